#include "entroplace/grid.hpp"

namespace entroplace {

std::pair<FieldSeries, FieldSeries> FieldSeries::split(double fraction) const {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split fraction must lie in (0, 1)");
    const int T = times();
    const int cut = static_cast<int>(fraction * T);
    if (cut < 1 || cut >= T)
        throw std::invalid_argument("split leaves an empty train or test set");

    FieldSeries train(shape_, land_);
    FieldSeries test(shape_, land_);
    for (int t = 0; t < cut; ++t) train.append(slab(t), stamps_[static_cast<size_t>(t)]);
    for (int t = cut; t < T; ++t) test.append(slab(t), stamps_[static_cast<size_t>(t)]);
    return {std::move(train), std::move(test)};
}

} // namespace entroplace
