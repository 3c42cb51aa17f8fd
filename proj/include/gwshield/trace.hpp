#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwshield/time.hpp"

namespace gwshield {

// Ground-truth packet class, not a detector verdict.
enum class Label : std::uint8_t { Benign = 0, Attack = 1 };

const char* label_name(Label l);
Label label_from_name(const std::string& s);  // throws InvalidInput

struct PacketRecord {
  Nanos arrival_time = 0;
  Label label = Label::Benign;
  std::uint32_t source_id = 0;
  std::uint64_t seq = 0;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// Invariants: arrival_time non-decreasing in seq, seq contiguous from 0.
using Trace = std::vector<PacketRecord>;

}  // namespace gwshield
