#pragma once

#include <functional>

#include "schurlr/vector_ops.hpp"

namespace schurlr {

/// y = op(x). Used for matrices, preconditioners and implicit operators.
template <Scalar T>
using LinearOperator = std::function<Vector<T>(const Vector<T>&)>;

}  // namespace schurlr
