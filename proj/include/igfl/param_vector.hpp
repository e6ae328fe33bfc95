#ifndef IGFL_PARAM_VECTOR_HPP
#define IGFL_PARAM_VECTOR_HPP

#include <cstddef>
#include <vector>

namespace igfl {

// Flat vector of model parameters or parameter deltas. All arithmetic is
// double precision.
using ParamVector = std::vector<double>;

ParamVector zeros(std::size_t n);

double dot(const ParamVector& a, const ParamVector& b);

// y += a * x
void axpy(double a, const ParamVector& x, ParamVector& y);

double l2_norm(const ParamVector& v);

// Sum_j coeffs[j] * vecs[j], accumulated in list order.
ParamVector combine(const std::vector<double>& coeffs,
                    const std::vector<const ParamVector*>& vecs);
ParamVector combine(const std::vector<double>& coeffs,
                    const std::vector<ParamVector>& vecs);

// Max-subtracted softmax. The normalizer accumulates the exponentials in
// descending value order, so the output is invariant under permutation of
// the input (bit-exact), not just up to rounding.
std::vector<double> softmax_stable(const std::vector<double>& scores);

bool all_finite(const ParamVector& v);

}  // namespace igfl

#endif
