#ifndef FUZZYBIN_DATASET_HPP
#define FUZZYBIN_DATASET_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "fuzzybin/core.hpp"

namespace fuzzybin {

/// Thrown when a dataset has no role column. Evaluation needs the enrolled/probe split.
class MissingRoleError : public UsageError {
public:
    using UsageError::UsageError;
};

/// Decimal text with 17 significant digits; round-trips every finite double.
std::string format_real(double value);

/// Strict parse of a whole cell; rejects trailing garbage and non-finite values.
std::optional<double> parse_real(std::string_view text);

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view text);

/// Reads `identity,role,f1,...,fM`. The header line is optional.
Dataset read_csv(std::istream& in, const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Splits on commas, trimming surrounding whitespace and a trailing CR.
std::vector<std::string> split_fields(std::string_view line);

}  // namespace fuzzybin

#endif  // FUZZYBIN_DATASET_HPP
