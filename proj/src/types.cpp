#include "knn/types.hpp"

#include <string>

#include "knn/error.hpp"

namespace knn {

std::string_view to_string(EnsembleClass c) {
  switch (c) {
    case EnsembleClass::GOE: return "goe";
    case EnsembleClass::GUE: return "gue";
    case EnsembleClass::GSE: return "gse";
    case EnsembleClass::Poisson: return "poisson";
  }
  return "unknown";
}

EnsembleClass parse_ensemble(std::string_view name) {
  if (name == "goe" || name == "GOE") return EnsembleClass::GOE;
  if (name == "gue" || name == "GUE") return EnsembleClass::GUE;
  if (name == "gse" || name == "GSE") return EnsembleClass::GSE;
  if (name == "poisson" || name == "Poisson") return EnsembleClass::Poisson;
  throw ValidationError("unknown ensemble '" + std::string(name) + "'");
}

std::optional<int> dyson_index(EnsembleClass c) {
  switch (c) {
    case EnsembleClass::GOE: return 1;
    case EnsembleClass::GUE: return 2;
    case EnsembleClass::GSE: return 4;
    case EnsembleClass::Poisson: return std::nullopt;
  }
  return std::nullopt;
}

void EnsembleSpec::validate() const {
  if (dim < 2) throw ValidationError("ensemble dimension must be >= 2, got " + std::to_string(dim));
}

}  // namespace knn
