#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <string>

namespace protograph {

// Binary named-array container: magic + count, then per array (names in
// sorted order) a length-prefixed name, row/col counts, and the row-major
// little-endian float64 payload.
void save_arrays(const std::filesystem::path& path,
                 const std::map<std::string, Eigen::MatrixXd>& arrays);

std::map<std::string, Eigen::MatrixXd> load_arrays(const std::filesystem::path& path);

}  // namespace protograph
