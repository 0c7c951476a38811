#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metabbo {

enum class Errc {
  invalid_function,
  invalid_dimension,
  dimension_mismatch,
  domain,
  population_too_small,
  strategy_arity,
  invalid_control,
  invalid_split,
  configuration,
  episode_finished,
  invalid_action,
  empty_input,
  empty_group,
  degenerate,
  incomplete_table,
  insufficient_data,
  unsupported_dimension,
  registry,
  incompatible_model,
  parse,
  io,
  numeric,
};

std::string_view to_string(Errc code) noexcept;

/// True for errors caused by bad user input or configuration (CLI exit code 2);
/// everything else is a runtime or numeric failure (exit code 3).
bool is_configuration_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace metabbo
