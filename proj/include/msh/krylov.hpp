#ifndef MSH_KRYLOV_HPP
#define MSH_KRYLOV_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "msh/errors.hpp"

namespace msh {

using LinOp = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct KrylovResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

struct KrylovOptions {
    double tol = 1e-10;       // relative residual target
    int max_iter = 100000;
    bool project_mean = false;  // keep iterates mean-free (singular periodic systems)
};

/// Jacobi-preconditioned conjugate gradient. `diag` holds the operator
/// diagonal; entries <= 0 are treated as unconstrained (mask value 1).
KrylovResult pcg(const LinOp& apply, const std::vector<double>& diag, const std::vector<double>& b,
                 std::vector<double>& x, const KrylovOptions& opt);

/// BiCGSTAB with the same interface, for nonsymmetric operators.
KrylovResult bicgstab(const LinOp& apply, const std::vector<double>& diag,
                      const std::vector<double>& b, std::vector<double>& x,
                      const KrylovOptions& opt);

}  // namespace msh

#endif
