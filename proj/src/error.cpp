#include "revs/error.hpp"

namespace revs {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::config: return "config";
        case ErrorKind::data: return "data";
        case ErrorKind::numeric: return "numeric";
        case ErrorKind::contract: return "contract";
        case ErrorKind::corrupt_checkpoint: return "corrupt_checkpoint";
        case ErrorKind::io: return "io";
        case ErrorKind::digest_mismatch: return "digest_mismatch";
        case ErrorKind::memorization: return "memorization";
        case ErrorKind::selection: return "selection";
        case ErrorKind::missing_artifact: return "missing_artifact";
    }
    return "unknown";
}

}  // namespace revs
