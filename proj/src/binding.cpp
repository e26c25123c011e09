#include "protograph/binding.hpp"

#include "protograph/errors.hpp"

namespace protograph {

TapeBinding::TapeBinding(Tape& tape, const ParameterSet& params, bool trainable)
    : tape_(&tape) {
  for (const auto& [name, value] : params.entries()) {
    Var v = trainable ? tape.param(value) : tape.constant(value);
    vars_.emplace(name, v);
  }
}

Var TapeBinding::at(const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw ArgumentError("parameter not bound on tape: " + name);
  return it->second;
}

GradMap TapeBinding::grads() const {
  GradMap out;
  for (const auto& [name, v] : vars_) out.emplace(name, tape_->grad(v));
  return out;
}

}  // namespace protograph
