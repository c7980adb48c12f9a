#include "monofollow/errors.hpp"

#include <sstream>

namespace monofollow {

namespace {

std::string describe_roots(const std::vector<double>& roots) {
    std::ostringstream os;
    os.precision(12);
    os << "uniqueness violated: first-order condition has " << roots.size() << " roots:";
    for (double r : roots) {
        os << ' ' << r;
    }
    return os.str();
}

}  // namespace

UniquenessViolatedError::UniquenessViolatedError(std::vector<double> roots)
    : Error(describe_roots(roots)), roots_(std::move(roots)) {}

}  // namespace monofollow
