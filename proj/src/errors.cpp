#include "levyop/errors.hpp"

namespace levyop {

void throw_parameter(const std::string& what) { throw ParameterError(what); }

}  // namespace levyop
