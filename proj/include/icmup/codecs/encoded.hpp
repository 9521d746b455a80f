#pragma once

namespace icmup {

/// Output of any codec: its payload plus the sizes of the input and of the
/// encoded form, both measured under one cost model.
template <typename Payload>
struct Encoded {
  Payload payload;
  double original_bits = 0.0;
  double encoded_bits = 0.0;

  double ratio() const { return original_bits > 0.0 ? encoded_bits / original_bits : 1.0; }

  friend bool operator==(const Encoded&, const Encoded&) = default;
};

}  // namespace icmup
