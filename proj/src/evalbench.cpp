#include "fuzzybin/evalbench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "fuzzybin/dataset.hpp"
#include "fuzzybin/fcm.hpp"
#include "fuzzybin/identify.hpp"
#include "fuzzybin/kmeans.hpp"

namespace fuzzybin {

namespace {

struct ProbeScan {
    std::size_t misses = 0;
    std::size_t scanned = 0;
};

ProbeScan scan_probes(const ClusterModel<double>& model, const Dataset& enrolled,
                      const std::vector<Index>& assignments, const Dataset& probes, Index t) {
    if (static_cast<Index>(assignments.size()) != enrolled.size()) {
        throw UsageError("assignment count does not match enrolled template count");
    }
    if (probes.size() > 0 && probes.dim() != model.dim()) {
        throw UsageError("probe dimension does not match model");
    }
    std::map<std::string, std::set<Index>> bins_of;
    std::vector<std::size_t> bin_size(static_cast<std::size_t>(model.clusters()), 0);
    for (Index i = 0; i < enrolled.size(); ++i) {
        const Index bin = assignments[static_cast<std::size_t>(i)];
        bins_of[enrolled.identities[static_cast<std::size_t>(i)]].insert(bin);
        ++bin_size[static_cast<std::size_t>(bin)];
    }

    ProbeScan scan;
    for (Index p = 0; p < probes.size(); ++p) {
        const auto& id = probes.identities[static_cast<std::size_t>(p)];
        const auto found = bins_of.find(id);
        if (found == bins_of.end()) throw UsageError("probe identity '" + id + "' has no enrolled templates");
        const Vector<double> q = probes.vectors.row(p).transpose();
        bool hit = false;
        for (Index bin : rank_clusters(q, model, t)) {
            hit = hit || found->second.count(bin) > 0;
            scan.scanned += bin_size[static_cast<std::size_t>(bin)];
        }
        if (!hit) ++scan.misses;
    }
    return scan;
}

}  // namespace

std::size_t bin_miss_count(const ClusterModel<double>& model, const Dataset& enrolled,
                           const std::vector<Index>& assignments, const Dataset& probes, Index t) {
    return scan_probes(model, enrolled, assignments, probes, t).misses;
}

double penetration_rate(const ClusterModel<double>& model, const Dataset& enrolled,
                        const std::vector<Index>& assignments, const Dataset& probes, Index t) {
    const auto scan = scan_probes(model, enrolled, assignments, probes, t);
    if (probes.size() == 0 || enrolled.size() == 0) throw UsageError("penetration_rate: no probes or no enrolled templates");
    return static_cast<double>(scan.scanned) /
           (static_cast<double>(probes.size()) * static_cast<double>(enrolled.size()));
}

EvalReport sweep(const Dataset& data, const SweepOptions& options) {
    Dataset enrolled = data.enrolled();
    Dataset probes = data.probes();
    if (options.top < 1) throw UsageError("top-t must be >= 1");
    for (int c : options.c_values) {
        if (c < 1 || c > enrolled.size()) {
            throw UsageError("cluster count " + std::to_string(c) + " outside [1, " +
                             std::to_string(enrolled.size()) + "]");
        }
    }
    if (options.normalize) {
        const auto norm = normalize_fit(data);
        enrolled.vectors = norm.apply(enrolled.vectors);
        if (probes.size() > 0) probes.vectors = norm.apply(probes.vectors);
    }

    EvalReport report;
    report.probes_total = static_cast<std::size_t>(probes.size());
    report.seed = options.seed;
    for (int c : options.c_values) {
        EvalRow row;
        row.c = c;
        const Index t = std::min<Index>(options.top, c);
        try {
            FcmOptions<double> fo;
            fo.clusters = c;
            fo.fuzzifier = options.fuzzifier;
            fo.epsilon = options.epsilon;
            fo.max_iterations = options.max_iterations;
            fo.seed = options.seed;
            const auto fcm = fcm_train(enrolled.vectors, fo);
            const auto fcm_bins = hard_assign(fcm.memberships);
            const auto km = kmeans_train(enrolled.vectors, c, options.seed, options.max_iterations);

            row.fcm_binmiss = bin_miss_count(fcm.model, enrolled, fcm_bins, probes, t);
            row.kmeans_top1_binmiss = bin_miss_count(km.model, enrolled, km.assignments, probes, 1);
            row.kmeans_top2_binmiss =
                bin_miss_count(km.model, enrolled, km.assignments, probes, std::min<Index>(2, c));
            if (probes.size() > 0) {
                row.fcm_penetration = penetration_rate(fcm.model, enrolled, fcm_bins, probes, t);
                row.kmeans_penetration = penetration_rate(km.model, enrolled, km.assignments, probes, 1);
            }
        } catch (const DegenerateClusterError& e) {
            row = EvalRow{};
            row.c = c;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

Dataset gen_synthetic(const SyntheticOptions& o) {
    if (o.identities < 1 || o.enrolled_per_id < 1 || o.probes_per_id < 0 || o.dim < 1) {
        throw UsageError("gen_synthetic: counts must be positive");
    }
    if (!(o.identity_spread > 0.0) || !(o.within_spread >= 0.0)) {
        throw UsageError("gen_synthetic: spreads must be positive");
    }
    if (o.latent_dim < 0) throw UsageError("gen_synthetic: latent_dim must be >= 0");
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const bool latent = o.latent_dim > 0 && o.latent_dim < o.dim;
    Matrix<double> mixing;
    if (latent) {
        mixing.resize(o.latent_dim, o.dim);
        const double scale = 1.0 / std::sqrt(static_cast<double>(o.latent_dim));
        for (Index a = 0; a < mixing.rows(); ++a)
            for (Index d = 0; d < mixing.cols(); ++d) mixing(a, d) = scale * noise(rng);
    }
    Vector<double> z(latent ? o.latent_dim : 0);
    const int per_id = o.enrolled_per_id + o.probes_per_id;
    const Index total = static_cast<Index>(o.identities) * per_id;

    Dataset data;
    data.vectors.resize(total, o.dim);
    Vector<double> prototype(o.dim);
    Index row = 0;
    for (int id = 0; id < o.identities; ++id) {
        if (latent) {
            for (Index a = 0; a < z.size(); ++a) z(a) = unit_draw(rng) * o.identity_spread;
            prototype = mixing.transpose() * z;
        } else {
            for (int d = 0; d < o.dim; ++d) prototype(d) = unit_draw(rng) * o.identity_spread;
        }
        const std::string name = "u" + std::to_string(id + 1);
        for (int k = 0; k < per_id; ++k, ++row) {
            for (int d = 0; d < o.dim; ++d) {
                const double v = prototype(d) + o.within_spread * noise(rng);
                data.vectors(row, d) = std::isfinite(v) ? v : prototype(d);
            }
            data.identities.push_back(name);
            data.roles.push_back(k < o.enrolled_per_id ? Role::enrolled : Role::probe);
        }
    }
    return data;
}

namespace {

constexpr const char* kReportHeader =
    "c,fcm_binmiss,kmeans_top1_binmiss,kmeans_top2_binmiss,fcm_penetration,kmeans_penetration";

template <typename T>
std::string cell(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<T>) {
        return format_real(*v);
    } else {
        return std::to_string(*v);
    }
}

std::string fixed(double v, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string render_report_csv(const EvalReport& report) {
    std::string out = kReportHeader;
    out += '\n';
    for (const auto& r : report.rows) {
        out += std::to_string(r.c) + ',' + cell(r.fcm_binmiss) + ',' + cell(r.kmeans_top1_binmiss) + ',' +
               cell(r.kmeans_top2_binmiss) + ',' + cell(r.fcm_penetration) + ',' + cell(r.kmeans_penetration) +
               '\n';
    }
    return out;
}

EvalReport read_report_csv(std::istream& in, const std::string& source) {
    EvalReport report;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& what) {
        throw ParseError(source + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kReportHeader) fail("expected report header");
            header_seen = true;
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 6) fail("expected 6 fields");
        EvalRow row;
        const auto c = parse_real(f[0]);
        if (!c || *c < 1 || *c != static_cast<int>(*c)) fail("bad cluster count '" + f[0] + "'");
        row.c = static_cast<int>(*c);
        auto count = [&](const std::string& s) -> std::optional<std::size_t> {
            if (s.empty()) return std::nullopt;
            const auto v = parse_real(s);
            if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) fail("bad count '" + s + "'");
            return static_cast<std::size_t>(*v);
        };
        auto fraction = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            const auto v = parse_real(s);
            if (!v) fail("bad fraction '" + s + "'");
            return v;
        };
        row.fcm_binmiss = count(f[1]);
        row.kmeans_top1_binmiss = count(f[2]);
        row.kmeans_top2_binmiss = count(f[3]);
        row.fcm_penetration = fraction(f[4]);
        row.kmeans_penetration = fraction(f[5]);
        report.rows.push_back(row);
    }
    if (!header_seen) throw ParseError(source + ": empty report");
    return report;
}

std::string render_report_svg(const EvalReport& report) {
    constexpr double kWidth = 640, kHeight = 400;
    constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    struct Series {
        const char* name;
        const char* color;
        const char* dash;
        std::optional<std::size_t> EvalRow::*field;
    };
    const Series series[] = {
        {"FCM", "#1f77b4", "", &EvalRow::fcm_binmiss},
        {"K-Means (top-1)", "#d62728", "", &EvalRow::kmeans_top1_binmiss},
        {"K-Means (top-2)", "#ff7f0e", "6,4", &EvalRow::kmeans_top2_binmiss},
    };

    int c_min = 0, c_max = 0;
    std::size_t y_max = 0;
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        const auto& r = report.rows[k];
        c_min = k == 0 ? r.c : std::min(c_min, r.c);
        c_max = k == 0 ? r.c : std::max(c_max, r.c);
        for (const auto& s : series) {
            if (r.*(s.field)) y_max = std::max(y_max, *(r.*(s.field)));
        }
    }
    const std::size_t y_step = std::max<std::size_t>(1, (y_max + 4) / 5);
    const double y_top = static_cast<double>(y_step * 5);
    auto px = [&](int c) {
        if (c_max == c_min) return kLeft + plot_w / 2;
        return kLeft + plot_w * (c - c_min) / static_cast<double>(c_max - c_min);
    };
    auto py = [&](double v) { return kTop + plot_h * (1.0 - v / y_top); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"14\" text-anchor=\"middle\">Bin miss count by number of clusters</text>\n";
    // Axes.
    svg << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\"" << fixed(kLeft + plot_w)
        << "\" y2=\"" << fixed(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
        << fixed(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double v = static_cast<double>(y_step * static_cast<std::size_t>(k));
        svg << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(v) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << y_step * static_cast<std::size_t>(k)
            << "</text>\n";
    }
    for (const auto& r : report.rows) {
        svg << "<text x=\"" << fixed(px(r.c)) << "\" y=\"" << fixed(kTop + plot_h + 16)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << r.c << "</text>\n";
    }
    svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 12)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">number of clusters (c)</text>\n";
    svg << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2) << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << fixed(kTop + plot_h / 2) << ")\">bin miss</text>\n";

    int legend_row = 0;
    for (const auto& s : series) {
        std::string points;
        std::vector<std::pair<double, double>> marks;
        for (const auto& r : report.rows) {
            const auto v = r.*(s.field);
            if (!v) continue;
            const double x = px(r.c), y = py(static_cast<double>(*v));
            if (!points.empty()) points += ' ';
            points += fixed(x) + ',' + fixed(y);
            marks.emplace_back(x, y);
        }
        if (marks.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
        if (*s.dash) svg << " stroke-dasharray=\"" << s.dash << '"';
        svg << " points=\"" << points << "\"/>\n";
        for (const auto& [x, y] : marks) {
            svg << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
        }
        const double ly = kTop + 10 + 18 * legend_row++;
        svg << "<line x1=\"" << fixed(kWidth - kRight + 10) << "\" y1=\"" << fixed(ly) << "\" x2=\""
            << fixed(kWidth - kRight + 30) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fixed(kWidth - kRight + 36) << "\" y=\"" << fixed(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(const EvalReport& report, const std::filesystem::path& dir, const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    const std::pair<std::string, std::string> files[] = {
        {stem + ".csv", render_report_csv(report)},
        {stem + ".svg", render_report_svg(report)},
    };
    for (const auto& [name, body] : files) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        out << body;
        if (!out) throw Error("write failed: " + (dir / name).string());
    }
}

}  // namespace fuzzybin
