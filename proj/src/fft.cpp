#include "ipfe/fft.hpp"

#include "ipfe/error.hpp"

#include <fftw3.h>

#include <functional>
#include <map>
#include <mutex>
#include <numeric>

namespace ipfe::fft {
namespace {

struct PlanKey {
  std::vector<std::size_t> shape;
  std::size_t first;
  std::size_t count;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_)
      fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key, std::size_t total) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end())
      return it->second;

    const std::size_t rank = key.shape.size();
    std::vector<std::ptrdiff_t> stride(rank, 1);
    for (std::size_t i = rank; i-- > 1;)
      stride[i - 1] = stride[i] * static_cast<std::ptrdiff_t>(key.shape[i]);

    std::vector<fftw_iodim64> dims, loops;
    for (std::size_t i = 0; i < rank; ++i) {
      fftw_iodim64 d{static_cast<std::ptrdiff_t>(key.shape[i]), stride[i],
                     stride[i]};
      if (i >= key.first && i < key.first + key.count)
        dims.push_back(d);
      else
        loops.push_back(d);
    }
    std::vector<fftw_complex> scratch(total);
    fftw_plan plan = fftw_plan_guru64_dft(
        static_cast<int>(dims.size()), dims.data(),
        static_cast<int>(loops.size()), loops.empty() ? nullptr : loops.data(),
        scratch.data(), scratch.data(), key.sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan)
      throw NumericalError("FFTW plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

} // namespace

void transform_axes(std::span<std::complex<double>> data,
                    const std::vector<std::size_t>& shape, std::size_t first,
                    std::size_t count, Direction dir) {
  const std::size_t total = std::accumulate(shape.begin(), shape.end(),
                                            std::size_t{1}, std::multiplies<>());
  if (data.size() != total)
    throw ShapeError("fft: buffer size does not match shape");
  if (count == 0 || first + count > shape.size())
    throw ShapeError("fft: axis range out of bounds");
  if (total == 0)
    return;
  fftw_plan plan =
      cache().get(PlanKey{shape, first, count, static_cast<int>(dir)}, total);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

void transform(std::span<std::complex<double>> data,
               const std::vector<std::size_t>& shape, Direction dir) {
  transform_axes(data, shape, 0, shape.size(), dir);
}

} // namespace ipfe::fft
