#include "subspde/errors.hpp"

namespace subspde {

PreconditionError::PreconditionError(std::string hypothesis, const std::string& what)
    : Error(hypothesis + ": " + what), hypothesis_(std::move(hypothesis)) {}

}  // namespace subspde
