#pragma once

#include <stdexcept>
#include <string>

namespace agesign {

enum class Errc {
  invalid_argument,
  region_out_of_bounds,
  zero_size_region,
  malformed_header,
  truncated_payload,
  unsupported_format,
  unsupported_maxval,
  image_too_small,
  no_candidate,
  empty_mask,
  empty_point_set,
  empty_radius_range,
  singular_system,
  negative_radicand,
  degenerate_circle,
  empty_dataset,
  non_finite_loss,
  bad_magic,
  shape_mismatch,
  truncated,
  badge_too_small,
  badge_out_of_corner,
  io_failure,
  empty_split,
};

const char* errc_name(Errc code) noexcept;

// All library failures are reported through this exception; code() is the
// machine-readable reason, what() carries context for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace agesign
