#include "gridsched/errors.hpp"

#include <utility>

namespace gridsched {

ValidationError::ValidationError(std::string path, const std::string& what)
    : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

}  // namespace gridsched
