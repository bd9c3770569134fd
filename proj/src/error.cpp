#include "nuclear/error.hpp"

namespace nuclear {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::resource_exhausted: return "resource exhausted";
    case ErrorKind::range: return "range error";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::precision: return "precision unreachable";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::usage: return "usage error";
  }
  return "error";
}

}  // namespace nuclear
