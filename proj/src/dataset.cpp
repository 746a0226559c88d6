#include "fuzzybin/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fuzzybin {

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::optional<double> parse_real(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string_view role_name(Role role) {
    return role == Role::enrolled ? "enrolled" : "probe";
}

std::optional<Role> parse_role(std::string_view text) {
    if (text == "enrolled") return Role::enrolled;
    if (text == "probe") return Role::probe;
    return std::nullopt;
}

std::vector<std::string> split_fields(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                        : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
        fields.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& source) {
    std::vector<std::vector<double>> rows;
    Dataset data;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool first_content = true;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (first_content) {
            first_content = false;
            if (fields[0] == "identity") {
                if (fields.size() < 2 || fields[1] != "role") {
                    throw MissingRoleError(source +
                                           ": no role column; every row needs a role of "
                                           "'enrolled' or 'probe' after the identity");
                }
                if (fields.size() < 3) parse_fail(source, line_no, "header declares no features");
                width = fields.size();
                continue;
            }
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width || fields.size() < 3) {
            parse_fail(source, line_no,
                       "expected " + std::to_string(width < 3 ? 3 : width) + " fields, got " +
                           std::to_string(fields.size()));
        }
        if (fields[0].empty()) parse_fail(source, line_no, "empty identity");
        const auto role = parse_role(fields[1]);
        if (!role) parse_fail(source, line_no, "role must be 'enrolled' or 'probe', got '" + fields[1] + "'");
        std::vector<double> values;
        values.reserve(fields.size() - 2);
        for (std::size_t k = 2; k < fields.size(); ++k) {
            const auto v = parse_real(fields[k]);
            if (!v) parse_fail(source, line_no, "non-numeric cell '" + fields[k] + "'");
            values.push_back(*v);
        }
        data.identities.push_back(fields[0]);
        data.roles.push_back(*role);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError(source + ": no data rows");
    const auto dim = static_cast<Index>(width - 2);
    data.vectors.resize(static_cast<Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Index d = 0; d < dim; ++d) data.vectors(static_cast<Index>(i), d) = rows[i][static_cast<std::size_t>(d)];
    }
    return data;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
    out << "identity,role";
    for (Index d = 0; d < data.dim(); ++d) out << ",f" << (d + 1);
    out << '\n';
    for (Index i = 0; i < data.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        out << data.identities[k] << ',' << role_name(data.roles[k]);
        for (Index d = 0; d < data.dim(); ++d) out << ',' << format_real(data.vectors(i, d));
        out << '\n';
    }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_csv(out, data);
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace fuzzybin
