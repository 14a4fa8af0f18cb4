#pragma once

#include <span>

#include "misobc/types.hpp"

namespace misobc {

// log2 |I + sum_{k in subset} h_k^H h_k q_k|, the rate bound of a user subset
// on the dual SIMO-MAC. Users are 0-based indices into the rows of H.
double subset_bound(const ChannelMatrix& h, const PowerVector& q, std::span<const int> subset);

// Sum-rate bound over all users.
double sum_bound(const ChannelMatrix& h, const PowerVector& q);

// Successive-decoding vertex of the region for the given order. The user at
// position 0 is decoded last; position k is interfered only by positions < k.
RateVector corner_rates(const ChannelMatrix& h, const PowerVector& q, const DecodingOrder& order);

// Checks all 2^K - 1 subset constraints. Throws CapacityError for K > 20.
bool in_region(const ChannelMatrix& h, const PowerVector& q, const RateVector& r, double tol);

namespace detail {

// Natural log-determinant of a Hermitian positive-definite matrix.
double logdet_hpd(const Eigen::MatrixXcd& a);

// Gram matrix I + sum_k q_k h_k^H h_k over the listed users.
Eigen::MatrixXcd shifted_gram(const ChannelMatrix& h, const PowerVector& q, std::span<const int> users);

void check_powers(const ChannelMatrix& h, const PowerVector& q);

}  // namespace detail

}  // namespace misobc
