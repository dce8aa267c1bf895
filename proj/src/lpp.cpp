#include "kpzlab/lpp.hpp"

#include <sstream>

namespace kpzlab {

namespace {

void check_level(const NoiseField& field, int level) {
  if (level < 0 || level >= field.level_count()) {
    std::ostringstream msg;
    msg << "level " << level << " outside [0, " << field.level_count() << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

double EnergyProfile::at(double y) const {
  const double pos = (y - x_min) / step - static_cast<double>(first_index);
  const auto i = static_cast<long long>(std::llround(pos));
  if (i < 0 || static_cast<std::size_t>(i) >= values.size() || std::abs(pos - static_cast<double>(i)) > 1e-7) {
    throw DomainError("profile queried off its grid");
  }
  return values[static_cast<std::size_t>(i)];
}

double staircase_energy(const NoiseField& field, const Staircase& s) {
  check_level(field, s.start.level);
  check_level(field, s.end.level);
  if (s.end.level < s.start.level) throw DomainError("staircase ends below its start level");
  if (s.jumps.size() != static_cast<std::size_t>(s.end.level - s.start.level)) {
    throw DomainError("jump list length must equal the number of level changes");
  }
  const Index start = field.grid_index(s.start.x);
  const Index end = field.grid_index(s.end.x);
  if (end < start) throw DomainError("staircase ends left of its start");

  double energy = 0.0;
  Index prev = start;
  for (int k = s.start.level; k <= s.end.level; ++k) {
    const Index next = field.grid_index(s.z(k + 1));
    if (next < prev || next > end) throw DomainError("jump list is not non-decreasing within [start.x, end.x]");
    energy += field(k, next) - field(k, prev);
    prev = next;
  }
  return energy;
}

EnergyProfile max_energy_profile(const NoiseField& field, UnscaledPoint start, int target_level) {
  check_level(field, start.level);
  check_level(field, target_level);
  if (target_level < start.level) throw DomainError("target level below start level");
  const Index first = field.grid_index(start.x);

  EnergyProfile profile;
  profile.start = start;
  profile.target_level = target_level;
  profile.first_index = first;
  profile.x_min = field.x_min();
  profile.step = field.step();
  profile.values = detail::sweep(field, first, field.grid_size() - 1, start.level, target_level);
  return profile;
}

Staircase geodesic(const NoiseField& field, UnscaledPoint start, UnscaledPoint end) {
  check_level(field, start.level);
  check_level(field, end.level);
  if (end.level < start.level || end.x < start.x - field.step() * NoiseField::kSnapSlack) {
    throw DomainError("geodesic endpoints are not ordered");
  }
  const Index first = field.grid_index(start.x);
  const Index last = field.grid_index(end.x);
  if (last < first) throw DomainError("geodesic endpoints are not ordered");

  std::vector<std::int32_t> argmax;
  const auto width = static_cast<std::size_t>(last - first + 1);
  (void)detail::sweep(field, first, last, start.level, end.level, &argmax);
  const auto offsets =
      detail::backtrack(argmax, width, end.level - start.level, static_cast<std::int32_t>(last - first));

  Staircase s;
  s.start = {field.x_at(first), start.level};
  s.end = {field.x_at(last), end.level};
  s.jumps.reserve(offsets.size());
  for (auto off : offsets) s.jumps.push_back(field.x_at(first + off));
  return s;
}

namespace detail {

std::vector<std::int32_t> backtrack(std::span<const std::int32_t> argmax, std::size_t width, int levels_above,
                                    std::int32_t end_offset) {
  std::vector<std::int32_t> jumps(static_cast<std::size_t>(levels_above));
  std::int32_t y = end_offset;
  for (int r = levels_above - 1; r >= 0; --r) {
    y = argmax[width * static_cast<std::size_t>(r) + static_cast<std::size_t>(y)];
    jumps[static_cast<std::size_t>(r)] = y;
  }
  return jumps;
}

}  // namespace detail

}  // namespace kpzlab
