#ifndef FUZZYBIN_EVALBENCH_HPP
#define FUZZYBIN_EVALBENCH_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fuzzybin/core.hpp"

namespace fuzzybin {

/// One cluster count of a bin-miss sweep. Absent values render as empty cells.
struct EvalRow {
    int c = 0;
    std::optional<std::size_t> fcm_binmiss;
    std::optional<std::size_t> kmeans_top1_binmiss;
    std::optional<std::size_t> kmeans_top2_binmiss;
    std::optional<double> fcm_penetration;
    std::optional<double> kmeans_penetration;  // top-1
    std::string error;                         // non-empty when training failed

    bool failed() const { return !error.empty(); }
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::size_t probes_total = 0;
    std::uint64_t seed = 0;
};

/// Probes whose searched bins hold none of their identity's enrolled templates.
std::size_t bin_miss_count(const ClusterModel<double>& model, const Dataset& enrolled,
                           const std::vector<Index>& assignments, const Dataset& probes, Index t);

/// Mean fraction of the enrolled database scanned per probe.
double penetration_rate(const ClusterModel<double>& model, const Dataset& enrolled,
                        const std::vector<Index>& assignments, const Dataset& probes, Index t);

struct SweepOptions {
    std::vector<int> c_values;
    Index top = 2;
    double fuzzifier = 2.0;
    double epsilon = 1e-5;
    int max_iterations = 300;
    std::uint64_t seed = 0;
    bool normalize = false;
};

/// Trains FCM and k-means on the enrolled templates for each c and scores the probes.
/// The searched bin count is min(top, c).
EvalReport sweep(const Dataset& data, const SweepOptions& options);

struct SyntheticOptions {
    int identities = 1000;
    int enrolled_per_id = 6;
    int probes_per_id = 3;
    int dim = 27;
    double identity_spread = 1.0;
    double within_spread = 0.12;
    std::uint64_t seed = 0;
    int latent_dim = 4;  // 0 or >= dim: prototypes fill the whole cube
};

/// Gaussian templates around identity prototypes. Prototypes are uniform in a
/// latent cube, mapped into feature space by a random Gaussian matrix drawn
/// once per seed. Rows are grouped per identity: enrolled templates first, then probes.
Dataset gen_synthetic(const SyntheticOptions& options);

/// CSV columns: c,fcm_binmiss,kmeans_top1_binmiss,kmeans_top2_binmiss,fcm_penetration,kmeans_penetration
std::string render_report_csv(const EvalReport& report);
/// Line chart of bin-miss count against c, one series per method.
std::string render_report_svg(const EvalReport& report);
EvalReport read_report_csv(std::istream& in, const std::string& source = "<stream>");

/// Writes `<stem>.csv` and `<stem>.svg` into `dir`, creating it if needed.
void emit_report(const EvalReport& report, const std::filesystem::path& dir,
                 const std::string& stem = "binmiss");

}  // namespace fuzzybin

#endif  // FUZZYBIN_EVALBENCH_HPP
