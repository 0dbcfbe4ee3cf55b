#include "feaskit/sources.hpp"

#include <stdexcept>

namespace feaskit {

MvnSource::MvnSource(std::vector<std::vector<double>> means,
                     std::vector<CovarianceSpec> covariances, SeedSpec seed, std::uint64_t rep)
    : means_(std::move(means)), covariances_(std::move(covariances)) {
    if (means_.empty() || means_.size() != covariances_.size())
        throw std::invalid_argument("mvn source: one mean and covariance per system required");
    s_ = static_cast<long>(means_.front().size());
    for (std::size_t i = 0; i < means_.size(); ++i) {
        if (static_cast<long>(means_[i].size()) != s_ ||
            static_cast<long>(covariances_[i].dim()) != s_)
            throw std::invalid_argument("mvn source: dimension mismatch");
        streams_.push_back(derive_stream(seed, rep, i));
    }
}

void MvnSource::next(long system, std::span<double> out) {
    sample_mvn(streams_[system], means_[system], covariances_[system], out);
}

ConstantSource::ConstantSource(std::vector<std::vector<double>> values)
    : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("constant source: no systems");
    s_ = static_cast<long>(values_.front().size());
    for (const auto& v : values_)
        if (static_cast<long>(v.size()) != s_)
            throw std::invalid_argument("constant source: dimension mismatch");
}

void ConstantSource::next(long system, std::span<double> out) {
    const auto& v = values_[system];
    for (long l = 0; l < s_; ++l) out[l] = v[l];
}

}  // namespace feaskit
