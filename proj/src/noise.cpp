#include "phrl/noise.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace phrl {

double laplace_inverse_cdf(double u, double scale) {
  const double centered = u - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(centered));
  return centered < 0.0 ? -magnitude : magnitude;
}

double sample_laplace(double scale, RandomStream& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace scale: must be positive");
  return laplace_inverse_cdf(rng.uniform_open(), scale);
}

namespace {

const char* kind_name(CounterKind kind) {
  switch (kind) {
    case CounterKind::Visit:
      return "visit";
    case CounterKind::Reward:
      return "reward";
    case CounterKind::Transition:
      return "transition";
  }
  return "?";
}

}  // namespace

std::string CounterId::to_string() const {
  std::string out = kind_name(kind);
  out += "/h=" + std::to_string(h) + "/s=" + std::to_string(s) + "/a=" + std::to_string(a);
  if (kind == CounterKind::Transition) out += "/s'=" + std::to_string(s_next);
  return out;
}

void RecordingNoise::write_jsonl(std::ostream& out) const {
  for (const auto& r : records_) {
    nlohmann::json j{{"episode", r.episode},  {"counter", r.id.to_string()},
                     {"kind", kind_name(r.id.kind)}, {"h", r.id.h},
                     {"s", r.id.s},             {"a", r.id.a},
                     {"s_next", r.id.s_next},   {"scale", r.scale}};
    out << j.dump() << '\n';
  }
}

}  // namespace phrl
