#include "tdet/error.hpp"

namespace tdet {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::unsupported_layout: return "unsupported_layout";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::domain: return "domain";
    case ErrorKind::vocabulary: return "vocabulary";
    case ErrorKind::identity: return "identity";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::shape: return "shape";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::placement: return "placement";
    case ErrorKind::split: return "split";
    case ErrorKind::empty_dataset: return "empty_dataset";
  }
  return "unknown";
}

}  // namespace tdet
