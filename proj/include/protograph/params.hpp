#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace protograph {

// Registry of named trainable arrays. Names are unique, shapes are fixed at
// creation, and iteration order is the sorted name order (std::map), which
// keeps checkpoint manifests and optimizer sweeps deterministic.
class ParameterSet {
 public:
  Eigen::MatrixXd& create(const std::string& name, Eigen::MatrixXd value);

  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  Eigen::MatrixXd& at(const std::string& name);
  const Eigen::MatrixXd& at(const std::string& name) const;

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }

  // Throws NumericError naming the first offending parameter, if any.
  void check_finite() const;

  const std::map<std::string, Eigen::MatrixXd>& entries() const { return entries_; }
  std::map<std::string, Eigen::MatrixXd>& entries() { return entries_; }

 private:
  std::map<std::string, Eigen::MatrixXd> entries_;
};

using GradMap = std::map<std::string, Eigen::MatrixXd>;

}  // namespace protograph
