// fuzzybin: extract -> train -> identify -> eval -> report.
//
// Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numerical failure.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fuzzybin/dataset.hpp"
#include "fuzzybin/evalbench.hpp"
#include "fuzzybin/fcm.hpp"
#include "fuzzybin/identify.hpp"
#include "fuzzybin/kmeans.hpp"
#include "fuzzybin/model_io.hpp"
#include "fuzzybin/sigfeat.hpp"

namespace fs = std::filesystem;
using namespace fuzzybin;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string join(const std::vector<Index>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s;
}

std::string join(const Vector<double>& v) {
    std::string s;
    for (Index k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_real(v(k));
    return s;
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << body;
}

// ---------------------------------------------------------------- extract

struct ImageInput {
    fs::path path;
    std::string identity;
    long index = 0;
};

// `<identity>_<index>.<ext>`; a stem without a numeric suffix is all identity.
ImageInput parse_image_name(const fs::path& path) {
    ImageInput in{path, path.stem().string(), 0};
    const auto stem = path.stem().string();
    const auto cut = stem.rfind('_');
    if (cut != std::string::npos && cut > 0 && cut + 1 < stem.size()) {
        long idx = 0;
        const auto* first = stem.data() + cut + 1;
        const auto* last = stem.data() + stem.size();
        auto [ptr, ec] = std::from_chars(first, last, idx);
        if (ec == std::errc() && ptr == last) {
            in.identity = stem.substr(0, cut);
            in.index = idx;
        }
    }
    return in;
}

bool is_image(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".pgm" || ext == ".pbm";
}

int cmd_extract(const std::vector<std::string>& inputs, const std::string& out_path, int enrolled_count,
                double hpr_fraction) {
    std::vector<ImageInput> images;
    for (const auto& arg : inputs) {
        const fs::path p(arg);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && is_image(entry.path())) images.push_back(parse_image_name(entry.path()));
            }
        } else {
            images.push_back(parse_image_name(p));
        }
    }
    if (images.empty()) {
        std::cerr << "error: no inputs\n";
        return kExitUsage;
    }
    std::sort(images.begin(), images.end(), [](const ImageInput& a, const ImageInput& b) {
        return std::tie(a.identity, a.index, a.path) < std::tie(b.identity, b.index, b.path);
    });

    Dataset data;
    data.vectors.resize(static_cast<Index>(images.size()), kSignatureFeatureCount);
    bool failed = false;
    Index row = 0;
    for (const auto& img : images) {
        try {
            const auto features = extract_features(preprocess(load_gray(img.path), hpr_fraction));
            for (const auto& w : features.warnings) std::cerr << img.path.string() << ": warning: " << w << '\n';
            data.vectors.row(row++) = features.values.transpose();
            data.identities.push_back(img.identity);
            data.roles.push_back(img.index <= enrolled_count ? Role::enrolled : Role::probe);
        } catch (const Error& e) {
            std::cerr << img.path.string() << ": error: " << e.what() << '\n';
            failed = true;
        }
    }
    if (failed) return kExitData;
    std::ostringstream csv;
    write_csv(csv, data);
    write_text(out_path, csv.str());
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string features;
    int clusters = 2;
    double fuzzifier = 2.0;
    double epsilon = 1e-5;
    int max_iterations = 300;
    std::uint64_t seed = 0;
    bool normalize = false;
    bool kmeans = false;
    std::string out;
};

int cmd_train(const TrainArgs& a) {
    if (a.clusters < 1) throw UsageError("--clusters must be >= 1");
    const Dataset all = load_csv(a.features);
    Dataset enrolled = all.enrolled();
    if (enrolled.size() == 0) throw UsageError("no enrolled templates to train on");

    ModelFile file;
    std::optional<Normalization<double>> norm;
    if (a.normalize) {
        norm = normalize_fit(all);
        enrolled.vectors = norm->apply(enrolled.vectors);
    }
    try {
        if (a.kmeans) {
            auto km = kmeans_train(enrolled.vectors, a.clusters, a.seed, a.max_iterations);
            km.model.epsilon = a.epsilon;
            file.model = std::move(km.model);
            file.assignments = std::move(km.assignments);
        } else {
            FcmOptions<double> o;
            o.clusters = a.clusters;
            o.fuzzifier = a.fuzzifier;
            o.epsilon = a.epsilon;
            o.max_iterations = a.max_iterations;
            o.seed = a.seed;
            auto fcm = fcm_train(enrolled.vectors, o);
            file.assignments = hard_assign(fcm.memberships);
            file.model = std::move(fcm.model);
        }
    } catch (const DegenerateClusterError& e) {
        std::cerr << "error: " << e.what() << " (cluster index " << e.cluster() << "); retry with another --seed\n";
        return kExitNumeric;
    }
    file.model.normalization = norm;
    file.template_ids = enrolled.identities;
    save_model(file, a.out);
    std::cout << "iterations_run=" << file.model.iterations_run << '\n'
              << "final_objective=" << format_real(file.model.final_objective) << '\n';
    return 0;
}

// ---------------------------------------------------------------- identify

struct IdentifyArgs {
    std::string model;
    std::string enrolled;
    std::string query;
    int top = 2;
    bool structured = false;
    bool exhaustive = false;
};

int cmd_identify(const IdentifyArgs& a) {
    const ModelFile file = load_model(a.model);
    const auto& model = file.model;
    if (a.top < 1 || a.top > model.clusters()) {
        throw UsageError("--top must lie in [1, " + std::to_string(model.clusters()) + "]");
    }
    Dataset enrolled = load_csv(a.enrolled).enrolled();
    if (enrolled.dim() != model.dim()) {
        throw UsageError("enrolled CSV has dimension " + std::to_string(enrolled.dim()) + ", model has " +
                         std::to_string(model.dim()));
    }
    if (static_cast<std::size_t>(enrolled.size()) != file.assignments.size()) {
        throw UsageError("enrolled CSV has " + std::to_string(enrolled.size()) + " templates, model indexes " +
                         std::to_string(file.assignments.size()));
    }
    if (model.normalization) enrolled.vectors = model.normalization->apply(enrolled.vectors);

    Dataset queries;
    std::error_code ec;
    if (fs::is_regular_file(a.query, ec)) {
        queries = load_csv(a.query);
    } else {
        const auto cells = split_fields(a.query);
        queries.vectors.resize(1, static_cast<Index>(cells.size()));
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto v = parse_real(cells[k]);
            if (!v) throw ParseError("--query: '" + a.query + "' is neither a file nor a list of numbers");
            queries.vectors(0, static_cast<Index>(k)) = *v;
        }
        queries.identities.push_back("");
        queries.roles.push_back(Role::probe);
    }
    if (queries.dim() != model.dim()) {
        throw UsageError("query has dimension " + std::to_string(queries.dim()) + ", model has " +
                         std::to_string(model.dim()));
    }
    if (model.normalization) queries.vectors = model.normalization->apply(queries.vectors);

    bool all_agree = true;
    for (Index k = 0; k < queries.size(); ++k) {
        const Vector<double> q = queries.vectors.row(k).transpose();
        const auto r = identify(q, model, enrolled, file.assignments, a.top);
        const std::string best = r.best_identity.value_or("");
        std::optional<Index> full;
        if (a.exhaustive) {
            full = exhaustive_nearest(q, enrolled);
            all_agree = all_agree && full == r.best_template;
        }
        if (a.structured) {
            std::cout << "query=" << k << '\n';
            if (!queries.identities[static_cast<std::size_t>(k)].empty()) {
                std::cout << "query_identity=" << queries.identities[static_cast<std::size_t>(k)] << '\n';
            }
            std::cout << "ranked_clusters=" << join(r.ranked_clusters) << '\n'
                      << "memberships=" << join(r.query_memberships) << '\n'
                      << "candidate_count=" << r.candidate_count << '\n'
                      << "best_identity=" << best << '\n'
                      << "best_distance=" << format_real(r.best_distance) << '\n';
            if (a.exhaustive) {
                std::cout << "exhaustive_identity="
                          << (full ? enrolled.identities[static_cast<std::size_t>(*full)] : std::string()) << '\n'
                          << "exhaustive_match=" << (full == r.best_template ? "true" : "false") << '\n';
            }
            std::cout << '\n';
        } else {
            std::cout << "query " << k << ": identity " << (best.empty() ? "<none>" : best) << " at distance "
                      << format_real(r.best_distance) << ", clusters [" << join(r.ranked_clusters) << "], "
                      << r.candidate_count << " candidates";
            if (a.exhaustive) std::cout << (full == r.best_template ? ", matches exhaustive scan" : ", DIFFERS from exhaustive scan");
            std::cout << '\n';
        }
    }
    return all_agree ? 0 : kExitData;
}

// ---------------------------------------------------------------- eval / gen / report

std::vector<int> parse_c_range(const std::string& text) {
    const auto dots = text.find("..");
    auto number = [&](const std::string& s) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw UsageError("--c-range expects a..b, got '" + text + "'");
        }
        return v;
    };
    const int lo = number(dots == std::string::npos ? text : text.substr(0, dots));
    const int hi = dots == std::string::npos ? lo : number(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw UsageError("--c-range must satisfy 1 <= a <= b");
    std::vector<int> out;
    for (int c = lo; c <= hi; ++c) out.push_back(c);
    return out;
}

struct EvalArgs {
    std::string features;
    std::string c_range = "2..9";
    int top = 2;
    double fuzzifier = 2.0;
    double epsilon = 1e-5;
    int max_iterations = 300;
    std::uint64_t seed = 0;
    bool normalize = false;
    std::string out = "report";
};

int cmd_eval(const EvalArgs& a) {
    SweepOptions o;
    o.c_values = parse_c_range(a.c_range);
    o.top = a.top;
    o.fuzzifier = a.fuzzifier;
    o.epsilon = a.epsilon;
    o.max_iterations = a.max_iterations;
    o.seed = a.seed;
    o.normalize = a.normalize;
    const Dataset data = load_csv(a.features);
    if (data.probes().size() == 0) {
        throw UsageError("dataset has no probe rows; eval needs enrolled templates for training and probe rows for searching");
    }
    const auto report = sweep(data, o);
    emit_report(report, a.out);
    std::cout << "probes_total=" << report.probes_total << '\n';
    bool any_failed = false;
    for (const auto& row : report.rows) {
        if (row.failed()) {
            std::cerr << "c=" << row.c << ": " << row.error << '\n';
            any_failed = true;
        }
    }
    std::cout << render_report_csv(report);
    return any_failed ? kExitNumeric : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy C-Means binning of biometric feature databases"};
    app.require_subcommand(1);

    std::vector<std::string> extract_inputs;
    std::string extract_out;
    int enrolled_count = 6;
    double hpr_fraction = 0.75;
    auto* extract = app.add_subcommand("extract", "Compute 27 signature features per PGM/PBM image");
    extract->add_option("inputs", extract_inputs, "Image files or directories (<identity>_<index>.pgm)")->required();
    extract->add_option("--out", extract_out, "Output CSV (default: standard output)");
    extract->add_option("--enrolled-count", enrolled_count, "Images with index <= this are enrolled, the rest probes")
        ->check(CLI::NonNegativeNumber);
    extract->add_option("--hpr-fraction", hpr_fraction, "High-pressure threshold within the ink intensity range")
        ->check(CLI::Range(0.0, 1.0));

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Fit a cluster index on the enrolled templates");
    train->add_option("features", ta.features, "Feature CSV")->required();
    train->add_option("--clusters", ta.clusters, "Number of clusters c")->required();
    train->add_option("--fuzzifier", ta.fuzzifier, "Fuzzifier m (> 1)");
    train->add_option("--epsilon", ta.epsilon, "Termination threshold on max membership change");
    train->add_option("--max-iterations", ta.max_iterations, "Iteration cap");
    train->add_option("--seed", ta.seed, "Initialization seed");
    train->add_flag("--normalize", ta.normalize, "Min-max normalize using the enrolled templates");
    train->add_flag("--kmeans", ta.kmeans, "Train the hard k-means baseline instead");
    train->add_option("--out", ta.out, "Model file to write")->required();

    IdentifyArgs ia;
    auto* ident = app.add_subcommand("identify", "Search the top-t bins for the nearest enrolled template");
    ident->add_option("model", ia.model, "Model file")->required();
    ident->add_option("enrolled", ia.enrolled, "Feature CSV the model was trained on")->required();
    ident->add_option("--query", ia.query, "Comma-separated feature values, or a feature CSV of queries")->required();
    ident->add_option("--top", ia.top, "Number of clusters to search");
    ident->add_flag("--kv,--structured", ia.structured, "Line-delimited key=value output");
    ident->add_flag("--exhaustive", ia.exhaustive, "Also scan the whole database and compare");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Bin-miss sweep over cluster counts, FCM against k-means");
    eval->add_option("features", ea.features, "Feature CSV with enrolled and probe rows")->required();
    eval->add_option("--c-range", ea.c_range, "Cluster counts a..b");
    eval->add_option("--top", ea.top, "FCM bins searched per probe");
    eval->add_option("--fuzzifier", ea.fuzzifier, "Fuzzifier m (> 1)");
    eval->add_option("--epsilon", ea.epsilon, "Termination threshold");
    eval->add_option("--max-iterations", ea.max_iterations, "Iteration cap");
    eval->add_option("--seed", ea.seed, "Seed shared by FCM and k-means");
    eval->add_flag("--normalize", ea.normalize, "Min-max normalize using the enrolled templates");
    eval->add_option("--out", ea.out, "Output directory for binmiss.csv and binmiss.svg");

    SyntheticOptions go;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic labeled feature database");
    gen->add_option("--identities", go.identities, "Number of identities");
    gen->add_option("--enrolled", go.enrolled_per_id, "Enrolled templates per identity");
    gen->add_option("--probes", go.probes_per_id, "Probe templates per identity");
    gen->add_option("--dim", go.dim, "Feature dimension");
    gen->add_option("--identity-spread", go.identity_spread, "Scale of the prototype cube");
    gen->add_option("--latent-dim", go.latent_dim, "Intrinsic dimension of the prototypes (0: full)");
    gen->add_option("--within-spread", go.within_spread, "Per-template Gaussian noise std");
    gen->add_option("--seed", go.seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output CSV (default: standard output)");

    std::string report_in, report_out = "report", report_stem = "binmiss";
    auto* report = app.add_subcommand("report", "Re-render a bin-miss report CSV as CSV and SVG");
    report->add_option("input", report_in, "Report CSV")->required();
    report->add_option("--out", report_out, "Output directory");
    report->add_option("--stem", report_stem, "Output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*extract) return cmd_extract(extract_inputs, extract_out, enrolled_count, hpr_fraction);
        if (*train) return cmd_train(ta);
        if (*ident) return cmd_identify(ia);
        if (*eval) return cmd_eval(ea);
        if (*gen) {
            std::ostringstream csv;
            write_csv(csv, gen_synthetic(go));
            write_text(gen_out, csv.str());
            return 0;
        }
        if (*report) {
            std::ifstream in(report_in, std::ios::binary);
            if (!in) throw ParseError("cannot open " + report_in);
            emit_report(read_report_csv(in, report_in), report_out, report_stem);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DegenerateClusterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
