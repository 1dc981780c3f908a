#include "fracount/detail/coefficients.hpp"

#include <map>
#include <utility>

namespace fracount::detail {

KsCoefficients::KsCoefficients(FractalityParams params) : params_(params) {
    auto first = std::make_shared<KsCoefficientData>();
    first->log_coeff.push_back(0);
    data_ = std::move(first);
}

std::shared_ptr<const KsCoefficientData> KsCoefficients::at_least(std::size_t n) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (data_->size() >= n) return data_;

    const std::size_t target = std::max<std::size_t>({n, 2 * data_->size(), 64});
    auto next = std::make_shared<KsCoefficientData>(*data_);
    next->log_coeff.reserve(target + 1);
    next->ratio_q.reserve(target);
    next->ratio_ld.reserve(target);
    next->ratio_d.reserve(target);

    const quad beta = params_.beta();
    const quad rho = static_cast<quad>(params_.mu()) + beta;
    for (std::size_t k = next->size(); k < target; ++k) {
        const quad kr = static_cast<quad>(k) * rho;
        const quad log_ratio = lgammaq(kr + beta + 1) - lgammaq(kr + rho + 1);
        const quad ratio = expq(log_ratio);
        next->log_coeff.push_back(next->log_coeff.back() + log_ratio);
        next->ratio_q.push_back(ratio);
        next->ratio_ld.push_back(static_cast<long double>(ratio));
        next->ratio_d.push_back(static_cast<double>(ratio));
    }
    data_ = std::move(next);
    return data_;
}

std::shared_ptr<const KsCoefficients> ks_coefficients(const FractalityParams& params) {
    static std::mutex mutex;
    static std::map<std::pair<double, double>, std::shared_ptr<const KsCoefficients>> registry;

    const std::pair<double, double> key{params.mu(), params.beta()};
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = registry.find(key); it != registry.end()) return it->second;
    // Outstanding shared_ptrs survive a flush.
    if (registry.size() >= 1024) registry.clear();
    auto entry = std::make_shared<const KsCoefficients>(params);
    registry.emplace(key, entry);
    return entry;
}

}  // namespace fracount::detail
