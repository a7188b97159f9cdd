#include "fitact/activation.hpp"

namespace fitact {

std::string to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::gbrelu: return "gbrelu";
    case ActivationKind::fitrelu_naive: return "fitrelu_naive";
    case ActivationKind::fitrelu: return "fitrelu";
  }
  return "?";
}

std::string to_string(GBReluMode m) {
  return m == GBReluMode::squash_to_zero ? "squash_to_zero" : "clamp_to_bound";
}

ActivationKind activation_kind_from_string(const std::string& s) {
  if (s == "identity") return ActivationKind::identity;
  if (s == "relu") return ActivationKind::relu;
  if (s == "gbrelu") return ActivationKind::gbrelu;
  if (s == "fitrelu_naive") return ActivationKind::fitrelu_naive;
  if (s == "fitrelu") return ActivationKind::fitrelu;
  throw ConfigError("unknown activation kind '" + s + "'");
}

GBReluMode gbrelu_mode_from_string(const std::string& s) {
  if (s == "squash_to_zero" || s == "squash") return GBReluMode::squash_to_zero;
  if (s == "clamp_to_bound" || s == "clamp") return GBReluMode::clamp_to_bound;
  throw ConfigError("unknown gbrelu mode '" + s + "'");
}

void ActivationConfig::validate() const {
  if (kind == ActivationKind::gbrelu && global_bound <= 0.0) {
    throw ConfigError("gbrelu requires a positive global bound, got " + std::to_string(global_bound));
  }
  if (kind == ActivationKind::fitrelu && slope <= 0.0) {
    throw ConfigError("fitrelu requires a positive slope, got " + std::to_string(slope));
  }
}

}  // namespace fitact
