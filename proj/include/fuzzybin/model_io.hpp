#ifndef FUZZYBIN_MODEL_IO_HPP
#define FUZZYBIN_MODEL_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuzzybin/core.hpp"

namespace fuzzybin {

inline constexpr const char* kModelMagic = "fuzzybin-model";
inline constexpr int kModelVersion = 1;

/// A trained index on disk: the model plus the bin of every enrolled template.
struct ModelFile {
    ClusterModel<double> model;
    std::vector<Index> assignments;          // per enrolled template, in CSV order
    std::vector<std::string> template_ids;   // identity of each enrolled template
};

/// Line-oriented text; reals as 17-significant-digit decimals.
///
///   fuzzybin-model 1
///   dim <M>
///   clusters <c>
///   fuzzifier <m>            (1 marks a k-means model)
///   epsilon <e>
///   max_iterations <n>
///   seed <s>
///   iterations_run <n>
///   final_objective <J>
///   normalization none | normalization <M>, then M lines "norm <min> <max>"
///   c lines "center <v1> ... <vM>"
///   assignments <N>, then N lines "assign <row> <cluster> <identity>"
///   end
void write_model(std::ostream& out, const ModelFile& file);
ModelFile read_model(std::istream& in, const std::string& source = "<stream>");

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace fuzzybin

#endif  // FUZZYBIN_MODEL_IO_HPP
