#pragma once

#include <map>
#include <string>

#include "protograph/params.hpp"
#include "protograph/tape.hpp"

namespace protograph {

// Parameters entered onto a tape as leaves, addressable by name. After
// backward(), grads() collects the per-parameter gradients for the optimizer.
class TapeBinding {
 public:
  TapeBinding(Tape& tape, const ParameterSet& params, bool trainable);

  Var at(const std::string& name) const;
  bool has(const std::string& name) const { return vars_.count(name) != 0; }
  GradMap grads() const;

  Tape& tape() const { return *tape_; }

 private:
  Tape* tape_;
  std::map<std::string, Var> vars_;
};

}  // namespace protograph
