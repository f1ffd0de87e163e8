#pragma once

#include <string>
#include <vector>

#include "oracles.hpp"
#include "smls/generate.hpp"
#include "smls/model.hpp"

namespace fixtures {

// The 8x8 example used throughout the tests.
inline const char* kTable1 =
    "SM 8\n"
    "1: 5 7 1 2 6 8 4 3\n"
    "2: 2 3 7 5 4 1 8 6\n"
    "3: 8 5 1 4 6 2 3 7\n"
    "4: 3 2 7 4 1 6 8 5\n"
    "5: 7 2 5 1 3 6 8 4\n"
    "6: 1 6 7 5 8 4 2 3\n"
    "7: 2 5 7 6 3 4 8 1\n"
    "8: 3 8 4 5 7 2 6 1\n"
    "1: 5 3 7 6 1 2 8 4\n"
    "2: 8 6 3 5 7 2 1 4\n"
    "3: 1 5 6 2 4 8 7 3\n"
    "4: 8 7 3 2 4 1 5 6\n"
    "5: 6 4 7 3 8 1 2 5\n"
    "6: 2 8 5 4 6 3 7 1\n"
    "7: 7 5 2 1 8 6 4 3\n"
    "8: 7 4 1 5 2 3 6 8\n";

inline oracle::Profile table1_profile() {
  const std::vector<std::vector<smls::Id>> men = {{5, 7, 1, 2, 6, 8, 4, 3}, {2, 3, 7, 5, 4, 1, 8, 6},
                                                  {8, 5, 1, 4, 6, 2, 3, 7}, {3, 2, 7, 4, 1, 6, 8, 5},
                                                  {7, 2, 5, 1, 3, 6, 8, 4}, {1, 6, 7, 5, 8, 4, 2, 3},
                                                  {2, 5, 7, 6, 3, 4, 8, 1}, {3, 8, 4, 5, 7, 2, 6, 1}};
  const std::vector<std::vector<smls::Id>> women = {{5, 3, 7, 6, 1, 2, 8, 4}, {8, 6, 3, 5, 7, 2, 1, 4},
                                                    {1, 5, 6, 2, 4, 8, 7, 3}, {8, 7, 3, 2, 4, 1, 5, 6},
                                                    {6, 4, 7, 3, 8, 1, 2, 5}, {2, 8, 5, 4, 6, 3, 7, 1},
                                                    {7, 5, 2, 1, 8, 6, 4, 3}, {7, 4, 1, 5, 2, 3, 6, 8}};
  oracle::Profile p;
  p.n = 8;
  for (const auto& l : men) p.men.push_back(oracle::strict(l));
  for (const auto& l : women) p.women.push_back(oracle::strict(l));
  return p;
}

inline smls::Instance table1() { return table1_profile().build(); }

// Wives of men 1..8 in the worked example marriage.
inline const std::vector<smls::Id> kExampleWives = {2, 7, 4, 8, 6, 3, 5, 1};

// Three blocking pairs (m1,w1), (m1,w2), (m2,w1): m1 prefers w1 to w2 and w1
// prefers m2 to m1.
inline const char* kScenario =
    "SM 3\n"
    "1: 1 2 3\n"
    "2: 1 2 3\n"
    "3: 1 2 3\n"
    "1: 2 1 3\n"
    "2: 1 2 3\n"
    "3: 1 2 3\n";
inline const std::vector<smls::Id> kScenarioWives = {3, 2, 1};

}  // namespace fixtures
