#pragma once

#include <string>
#include <vector>

#include "whatif/scenario.hpp"

namespace testing_support {

inline const whatif::Scenario& coffee() {
  static const whatif::Scenario sc = whatif::load_scenario("coffee");
  return sc;
}

// The published optimal plan: roastery1 buys from supplier3 and serves cafe1,
// cafe2 and 10 light units of cafe3; roastery2 buys from suppliers 1 and 2 and
// ships 30 L + 100 D to cafe3.
inline whatif::Assignment coffee_published_plan(const whatif::Model& m) {
  whatif::Assignment a(m.num_vars(), 0.0);
  auto put = [&](const char* fam, std::initializer_list<std::string_view> idx, double v) {
    a.at(m.var(fam, idx)) = v;
  };
  put("x", {"supplier3", "roastery1"}, 100);
  put("x", {"supplier1", "roastery2"}, 80);
  put("x", {"supplier2", "roastery2"}, 50);
  put("y_light", {"roastery1", "cafe1"}, 20);
  put("y_dark", {"roastery1", "cafe1"}, 20);
  put("y_light", {"roastery1", "cafe2"}, 30);
  put("y_dark", {"roastery1", "cafe2"}, 20);
  put("y_light", {"roastery1", "cafe3"}, 10);
  put("y_light", {"roastery2", "cafe3"}, 30);
  put("y_dark", {"roastery2", "cafe3"}, 100);
  return a;
}

inline const char* kExclusiveProgram =
    "FIX y_light[roastery1,* != cafe2] = 0\n"
    "FIX y_dark[roastery1,* != cafe2] = 0\n"
    "FIX y_light[* != roastery1,cafe2] = 0\n"
    "FIX y_dark[* != roastery1,cafe2] = 0\n";

}  // namespace testing_support
