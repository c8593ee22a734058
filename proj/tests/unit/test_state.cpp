#include "doctest.h"
#include "psr/state.hpp"

using namespace psr;

TEST_CASE("parse_state: compact form") {
  const auto s = parse_state("11100000000", 11);
  CHECK(s.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(s[i] == (i < 3 ? ComponentStatus::Installed : ComponentStatus::Absent));
  }
}

TEST_CASE("parse_state: comma form with an incorrect component") {
  const auto s = parse_state("1,-1,0,0,0,0,0,0,0,0,0", 11);
  CHECK(s[0] == ComponentStatus::Installed);
  CHECK(s[1] == ComponentStatus::Incorrect);
  CHECK(is_error_state(s));
}

TEST_CASE("parse_state: rejects bad input") {
  CHECK_THROWS_AS(parse_state("1110", 11), Error);
  CHECK_THROWS_AS(parse_state("", 3), Error);
  CHECK_THROWS_AS(parse_state("1,2,0", 3), Error);
  CHECK_THROWS_AS(parse_state("1,,0", 3), Error);
  CHECK_THROWS_AS(parse_state("1-10", 4), Error);
  CHECK_THROWS_AS(parse_state("1,0,", 3), Error);
  CHECK_THROWS_AS(parse_state("1, 0, 1", 3), Error);
}

TEST_CASE("serialize_state round-trips both forms") {
  const AssemblyState s{1, -1, 0, 1};
  CHECK(serialize_state(s) == "1,-1,0,1");
  CHECK(parse_state(serialize_state(s), 4) == s);
  CHECK_THROWS_AS(serialize_state_compact(s), Error);

  const AssemblyState c{1, 0, 1};
  CHECK(serialize_state_compact(c) == "101");
  CHECK(parse_state("101", 3) == c);
}

TEST_CASE("diff_states classifies transitions") {
  const AssemblyState a{0, 1, -1, 1, 0};
  const AssemblyState b{1, 0, 0, -1, 0};
  const auto d = diff_states(a, b);
  REQUIRE(d.size() == 4);
  CHECK(d[0] == ComponentChange{0, Transition::Install});
  CHECK(d[1] == ComponentChange{1, Transition::Remove});
  CHECK(d[2] == ComponentChange{2, Transition::Remove});
  CHECK(d[3] == ComponentChange{3, Transition::Incorrect});

  CHECK(diff_states(a, a).empty());
  CHECK_THROWS_AS(diff_states(a, AssemblyState{0, 1}), Error);
}

TEST_CASE("diff_states: maintenance removal") {
  const auto prev = parse_state("11110111111", 11);
  const auto next = parse_state("11100111111", 11);
  const auto d = diff_states(prev, next);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == ComponentChange{3, Transition::Remove});
}

TEST_CASE("diff_states is inverted by swapping its arguments") {
  const AssemblyState a{0, 1, 1, 0};
  const AssemblyState b{1, 0, 1, 1};
  const auto fwd = diff_states(a, b);
  const auto back = diff_states(b, a);
  REQUIRE(fwd.size() == back.size());
  for (std::size_t k = 0; k < fwd.size(); ++k) {
    CHECK(fwd[k].component == back[k].component);
    CHECK(fwd[k].transition != back[k].transition);
  }
  CHECK(apply_changes(a, fwd) == b);
  CHECK(apply_changes(b, back) == a);
}

TEST_CASE("nearest_correct_state and hamming_distance") {
  const AssemblyState s{1, -1, 0, -1};
  CHECK(nearest_correct_state(s) == AssemblyState{1, 1, 0, 1});
  CHECK(hamming_distance(s, nearest_correct_state(s)) == 2);
  CHECK_FALSE(is_error_state(nearest_correct_state(s)));
}

TEST_CASE("AssemblyState rejects out-of-range statuses") {
  CHECK_THROWS_AS((AssemblyState{0, 2}), Error);
  CHECK(std::hash<AssemblyState>{}(AssemblyState{1, 0}) != std::hash<AssemblyState>{}(AssemblyState{0, 1}));
}
