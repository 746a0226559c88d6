#include "fuzzybin/model_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fuzzybin/dataset.hpp"

namespace fuzzybin {

void write_model(std::ostream& out, const ModelFile& file) {
    const auto& m = file.model;
    if (file.assignments.size() != file.template_ids.size()) {
        throw UsageError("model file: assignment and template id counts differ");
    }
    out << kModelMagic << ' ' << kModelVersion << '\n';
    out << "dim " << m.dim() << '\n';
    out << "clusters " << m.clusters() << '\n';
    out << "fuzzifier " << format_real(m.fuzzifier) << '\n';
    out << "epsilon " << format_real(m.epsilon) << '\n';
    out << "max_iterations " << m.max_iterations << '\n';
    out << "seed " << m.seed << '\n';
    out << "iterations_run " << m.iterations_run << '\n';
    out << "final_objective " << format_real(m.final_objective) << '\n';
    if (m.normalization) {
        out << "normalization " << m.normalization->dim() << '\n';
        for (Index d = 0; d < m.normalization->dim(); ++d) {
            out << "norm " << format_real(m.normalization->min(d)) << ' '
                << format_real(m.normalization->max(d)) << '\n';
        }
    } else {
        out << "normalization none\n";
    }
    for (Index j = 0; j < m.clusters(); ++j) {
        out << "center";
        for (Index d = 0; d < m.dim(); ++d) out << ' ' << format_real(m.centers(j, d));
        out << '\n';
    }
    out << "assignments " << file.assignments.size() << '\n';
    for (std::size_t i = 0; i < file.assignments.size(); ++i) {
        out << "assign " << i << ' ' << file.assignments[i] << ' ' << file.template_ids[i] << '\n';
    }
    out << "end\n";
}

namespace {

class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(source_ + ":" + std::to_string(line_no_) + ": " + what);
    }

    // Next line split into whitespace tokens; the first token must equal `key`.
    std::vector<std::string> expect(const std::string& key) {
        std::string line;
        if (!std::getline(in_, line)) {
            ++line_no_;
            fail("unexpected end of file, expected '" + key + "'");
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        last_line_ = line;
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        for (std::string t; ss >> t;) tokens.push_back(t);
        if (tokens.empty() || tokens[0] != key) fail("expected '" + key + "'");
        return tokens;
    }

    const std::string& last_line() const { return last_line_; }

    long long integer(const std::string& text) const {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) fail("bad integer '" + text + "'");
        return v;
    }

    std::uint64_t unsigned_integer(const std::string& text) const {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) fail("bad integer '" + text + "'");
        return v;
    }

    double real(const std::string& text) const {
        const auto v = parse_real(text);
        if (!v) fail("bad number '" + text + "'");
        return *v;
    }

    std::string single(const std::string& key) {
        auto tokens = expect(key);
        if (tokens.size() != 2) fail("'" + key + "' takes one value");
        return tokens[1];
    }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
    std::string last_line_;
};

}  // namespace

ModelFile read_model(std::istream& in, const std::string& source) {
    LineReader r(in, source);
    ModelFile file;
    auto& m = file.model;

    const auto header = r.expect(kModelMagic);
    if (header.size() != 2 || r.integer(header[1]) != kModelVersion) r.fail("unsupported model version");
    const auto dim = r.integer(r.single("dim"));
    const auto clusters = r.integer(r.single("clusters"));
    if (dim < 1 || clusters < 1) r.fail("dim and clusters must be positive");
    m.fuzzifier = r.real(r.single("fuzzifier"));
    m.epsilon = r.real(r.single("epsilon"));
    m.max_iterations = static_cast<int>(r.integer(r.single("max_iterations")));
    m.seed = r.unsigned_integer(r.single("seed"));
    m.iterations_run = static_cast<int>(r.integer(r.single("iterations_run")));
    m.final_objective = r.real(r.single("final_objective"));
    if (!(m.fuzzifier >= 1.0)) r.fail("fuzzifier must be >= 1");

    const auto norm = r.single("normalization");
    if (norm != "none") {
        if (r.integer(norm) != dim) r.fail("normalization dimension differs from dim");
        Normalization<double> n;
        n.min.resize(dim);
        n.max.resize(dim);
        for (Index d = 0; d < dim; ++d) {
            const auto t = r.expect("norm");
            if (t.size() != 3) r.fail("'norm' takes min and max");
            n.min(d) = r.real(t[1]);
            n.max(d) = r.real(t[2]);
        }
        m.normalization = std::move(n);
    }

    m.centers.resize(clusters, dim);
    for (Index j = 0; j < clusters; ++j) {
        const auto t = r.expect("center");
        if (static_cast<long long>(t.size()) != dim + 1) {
            r.fail("center row has " + std::to_string(t.size() - 1) + " values, expected " + std::to_string(dim));
        }
        for (Index d = 0; d < dim; ++d) m.centers(j, d) = r.real(t[static_cast<std::size_t>(d + 1)]);
    }

    const auto count = r.integer(r.single("assignments"));
    if (count < 0) r.fail("negative assignment count");
    for (long long i = 0; i < count; ++i) {
        const auto t = r.expect("assign");
        if (t.size() < 4) r.fail("'assign' takes row, cluster and identity");
        if (r.integer(t[1]) != i) r.fail("assignment rows out of order");
        const auto cluster = r.integer(t[2]);
        if (cluster < 0 || cluster >= clusters) r.fail("assignment cluster out of range");
        file.assignments.push_back(static_cast<Index>(cluster));
        // Identity is the rest of the line after the cluster token.
        std::istringstream ss(r.last_line());
        std::string skip;
        ss >> skip >> skip >> skip;
        std::string identity;
        std::getline(ss >> std::ws, identity);
        file.template_ids.push_back(identity);
    }
    r.expect("end");
    return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_model(out, file);
    if (!out) throw Error("write failed: " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_model(in, path.string());
}

}  // namespace fuzzybin
