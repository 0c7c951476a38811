#include "metabbo/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "metabbo/error.hpp"

namespace metabbo {

std::size_t Rng::index(std::size_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_function: return "invalid-function";
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::dimension_mismatch: return "dimension";
    case Errc::domain: return "domain";
    case Errc::population_too_small: return "population-too-small";
    case Errc::strategy_arity: return "strategy-arity";
    case Errc::invalid_control: return "invalid-control";
    case Errc::invalid_split: return "invalid-split";
    case Errc::configuration: return "configuration";
    case Errc::episode_finished: return "episode-finished";
    case Errc::invalid_action: return "invalid-action";
    case Errc::empty_input: return "empty-input";
    case Errc::empty_group: return "empty-group";
    case Errc::degenerate: return "division-degenerate";
    case Errc::incomplete_table: return "incomplete-table";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::unsupported_dimension: return "unsupported-dimension";
    case Errc::registry: return "registry";
    case Errc::incompatible_model: return "incompatible-model";
    case Errc::parse: return "parse";
    case Errc::io: return "io";
    case Errc::numeric: return "numeric";
  }
  return "unknown";
}

bool is_configuration_error(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_function:
    case Errc::invalid_dimension:
    case Errc::population_too_small:
    case Errc::invalid_split:
    case Errc::configuration:
    case Errc::registry:
    case Errc::incompatible_model:
    case Errc::parse:
      return true;
    default:
      return false;
  }
}

}  // namespace metabbo
