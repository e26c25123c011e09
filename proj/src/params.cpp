#include "protograph/params.hpp"

#include "protograph/errors.hpp"

namespace protograph {

Eigen::MatrixXd& ParameterSet::create(const std::string& name, Eigen::MatrixXd value) {
  if (entries_.count(name)) throw ArgumentError("parameter already exists: " + name);
  return entries_.emplace(name, std::move(value)).first->second;
}

Eigen::MatrixXd& ParameterSet::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ArgumentError("unknown parameter: " + name);
  return it->second;
}

const Eigen::MatrixXd& ParameterSet::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ArgumentError("unknown parameter: " + name);
  return it->second;
}

std::vector<std::string> ParameterSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

void ParameterSet::check_finite() const {
  for (const auto& [k, v] : entries_) {
    if (!v.allFinite()) throw NumericError("non-finite values in parameter: " + k);
  }
}

}  // namespace protograph
