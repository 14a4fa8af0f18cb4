#include "misobc/macregion.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "misobc/error.hpp"

namespace misobc {

DecodingOrder::DecodingOrder(std::vector<int> perm) : perm_(std::move(perm)) {
    std::vector<char> seen(perm_.size(), 0);
    for (int u : perm_) {
        if (u < 0 || u >= static_cast<int>(perm_.size()) || seen[static_cast<std::size_t>(u)]) {
            throw DimensionError("decoding order must be a permutation of 0..K-1");
        }
        seen[static_cast<std::size_t>(u)] = 1;
    }
}

DecodingOrder DecodingOrder::identity(int users) {
    std::vector<int> perm(static_cast<std::size_t>(users));
    std::iota(perm.begin(), perm.end(), 0);
    return DecodingOrder(std::move(perm));
}

int DecodingOrder::rank_of(int user) const {
    for (std::size_t i = 0; i < perm_.size(); ++i) {
        if (perm_[i] == user) return static_cast<int>(i);
    }
    throw DimensionError("user " + std::to_string(user) + " not in decoding order");
}

namespace detail {

double logdet_hpd(const Eigen::MatrixXcd& a) {
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw DimensionError("log-determinant of a non positive-definite matrix");
    }
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        acc += std::log(l(i, i).real());
    }
    return 2.0 * acc;
}

Eigen::MatrixXcd shifted_gram(const ChannelMatrix& h, const PowerVector& q, std::span<const int> users) {
    const auto m = h.cols();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(m, m);
    for (int k : users) {
        if (k < 0 || k >= h.rows()) {
            throw DimensionError("user index out of range");
        }
        const double qk = q(k);
        if (qk == 0.0) continue;
        // h_k^H h_k is the outer product of the conjugated row with itself.
        g.noalias() += qk * (h.row(k).adjoint() * h.row(k));
    }
    return g;
}

void check_powers(const ChannelMatrix& h, const PowerVector& q) {
    if (q.size() != h.rows()) {
        throw DimensionError("power vector length must equal the number of users");
    }
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        if (!(q(k) >= 0.0) || !std::isfinite(q(k))) {
            throw DimensionError("powers must be finite and nonnegative");
        }
    }
}

}  // namespace detail

double subset_bound(const ChannelMatrix& h, const PowerVector& q, std::span<const int> subset) {
    detail::check_powers(h, q);
    if (subset.empty()) {
        throw DimensionError("subset_bound needs a nonempty subset");
    }
    return detail::logdet_hpd(detail::shifted_gram(h, q, subset)) / std::numbers::ln2;
}

double sum_bound(const ChannelMatrix& h, const PowerVector& q) {
    std::vector<int> all(static_cast<std::size_t>(h.rows()));
    std::iota(all.begin(), all.end(), 0);
    return subset_bound(h, q, all);
}

RateVector corner_rates(const ChannelMatrix& h, const PowerVector& q, const DecodingOrder& order) {
    detail::check_powers(h, q);
    const auto k_users = static_cast<int>(h.rows());
    if (order.size() != k_users) {
        throw DimensionError("decoding order length must equal the number of users");
    }
    const auto m = h.cols();
    RateVector r(k_users);
    Eigen::MatrixXcd cumulative = Eigen::MatrixXcd::Identity(m, m);
    double previous = 0.0;
    for (int pos = 0; pos < k_users; ++pos) {
        const int user = order[pos];
        cumulative.noalias() += q(user) * (h.row(user).adjoint() * h.row(user));
        const double current = detail::logdet_hpd(cumulative);
        // Increments of a monotone set function; clamp rounding noise.
        r(user) = std::max(0.0, (current - previous) / std::numbers::ln2);
        previous = current;
    }
    return r;
}

bool in_region(const ChannelMatrix& h, const PowerVector& q, const RateVector& r, double tol) {
    detail::check_powers(h, q);
    const auto k_users = static_cast<int>(h.rows());
    if (r.size() != k_users) {
        throw DimensionError("rate vector length must equal the number of users");
    }
    if (k_users > 20) {
        throw CapacityError("in_region enumerates 2^K subsets; K must be <= 20");
    }
    for (int k = 0; k < k_users; ++k) {
        if (r(k) < -tol) return false;
    }
    std::vector<int> subset;
    subset.reserve(static_cast<std::size_t>(k_users));
    const std::uint32_t full = (1u << k_users);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        subset.clear();
        double rate_sum = 0.0;
        for (int k = 0; k < k_users; ++k) {
            if (mask & (1u << k)) {
                subset.push_back(k);
                rate_sum += r(k);
            }
        }
        if (rate_sum > subset_bound(h, q, subset) + tol) return false;
    }
    return true;
}

}  // namespace misobc
