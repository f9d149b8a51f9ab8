#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "phcsim/des.hpp"

using namespace phcsim;

TEST_CASE("events dispatch in timestamp order regardless of insertion") {
  EventCalendar<char> cal;
  cal.schedule(5.0, 'b');
  cal.schedule(3.0, 'a');
  auto [t1, p1] = cal.pop();
  CHECK(t1 == 3.0);
  CHECK(p1 == 'a');
  auto [t2, p2] = cal.pop();
  CHECK(t2 == 5.0);
  CHECK(p2 == 'b');
}

TEST_CASE("simultaneous events keep insertion order") {
  EventCalendar<char> cal;
  cal.schedule(7.0, 'A');
  cal.schedule(7.0, 'B');
  CHECK(cal.pop().second == 'A');
  CHECK(cal.pop().second == 'B');
}

TEST_CASE("an event at the current clock precedes later events") {
  EventCalendar<char> cal;
  cal.schedule(2.0, 'x');
  cal.pop();  // clock now 2
  cal.schedule(4.0, 'l');
  cal.schedule(2.0, 'n');
  CHECK(cal.pop().second == 'n');
}

TEST_CASE("scheduling into the past is a logic error") {
  EventCalendar<int> cal;
  cal.schedule(10.0, 1);
  cal.pop();  // clock now 10
  CHECK_THROWS_AS(cal.schedule(9.0, 2), std::logic_error);
}

TEST_CASE("the clock never moves backward") {
  EventCalendar<int> cal;
  for (int i = 0; i < 50; ++i) cal.schedule(50.0 - i, i);
  double prev = -1;
  while (!cal.empty()) {
    double t = cal.pop().first;
    CHECK(t >= prev);
    prev = t;
  }
  CHECK(cal.now() == 50.0);
}

namespace {

Subsystem make_doc_station() {
  Subsystem s;
  s.id = SubsystemId::Doc;
  s.service = ServiceDistribution::uniform(2.0, 2.0 + 1e-9);
  return s;
}

}  // namespace

TEST_CASE("an idle server starts the patient with zero wait") {
  Subsystem s = make_doc_station();
  RngStream rng(1, "svc");
  auto started = s.enter(7, 10.0, rng);
  REQUIRE(started.has_value());
  CHECK(started->patient == 7);
  CHECK(started->wait == 0.0);
  CHECK(started->completion_time == doctest::Approx(12.0));
  CHECK(s.wait_stats.count == 1);
  CHECK(s.wait_stats.sum == 0.0);
}

TEST_CASE("arrivals to a busy server join the queue head-first") {
  Subsystem s = make_doc_station();
  RngStream rng(1, "svc");
  s.enter(1, 0.0, rng);
  CHECK_FALSE(s.enter(2, 0.5, rng).has_value());
  CHECK(s.queue_length() == 1);
  CHECK(s.present() == 2);
}

TEST_CASE("three waiting patients are served in arrival order") {
  Subsystem s = make_doc_station();
  RngStream rng(1, "svc");
  auto first = s.enter(1, 0.0, rng);
  s.enter(2, 0.1, rng);
  s.enter(3, 0.2, rng);
  s.enter(4, 0.3, rng);
  std::vector<int> order;
  double now = first->completion_time;
  for (int i = 0; i < 3; ++i) {
    auto res = s.complete(now, rng);
    order.push_back(res.next->patient);
    now = res.next->completion_time;
  }
  CHECK(order == std::vector<int>{2, 3, 4});
}

TEST_CASE("completion hands back the wait of the next patient") {
  Subsystem s = make_doc_station();
  RngStream rng(1, "svc");
  auto first = s.enter(1, 0.0, rng);  // completes at ~2.0
  s.enter(2, 0.5, rng);
  auto res = s.complete(first->completion_time, rng);
  CHECK(res.completed == 1);
  REQUIRE(res.next.has_value());
  CHECK(res.next->patient == 2);
  CHECK(res.next->wait == doctest::Approx(1.5));
}

TEST_CASE("busy time accrues by the drawn service length") {
  Subsystem s = make_doc_station();
  RngStream rng(1, "svc");
  auto started = s.enter(1, 0.0, rng);
  s.complete(started->completion_time, rng);
  CHECK(s.busy_time == doctest::Approx(2.0));
  CHECK_FALSE(s.in_service.has_value());
}

TEST_CASE("completing an idle server is a logic error") {
  Subsystem s = make_doc_station();
  RngStream rng(1, "svc");
  CHECK_THROWS_AS(s.complete(1.0, rng), std::logic_error);
}

TEST_CASE("patients are conserved through a busy stretch") {
  Subsystem s = make_doc_station();
  RngStream rng(2, "svc");
  int entered = 0, exited = 0;
  double now = 0;
  auto first = s.enter(entered++, now, rng);
  double completion = first->completion_time;
  for (int i = 1; i < 20; ++i) s.enter(entered++, now += 0.1, rng);
  while (s.present() > 0) {
    auto res = s.complete(completion, rng);
    ++exited;
    if (res.next) completion = res.next->completion_time;
  }
  CHECK(entered == exited);
}

TEST_CASE("identical seeds give identical service sequences") {
  auto run = [](std::uint64_t seed) {
    Subsystem s = make_doc_station();
    s.service = ServiceDistribution::truncated_normal(3.451, 0.873);
    RngStream rng(seed, "det");
    std::vector<double> completions;
    auto first = s.enter(0, 0.0, rng);
    completions.push_back(first->completion_time);
    for (int i = 1; i < 50; ++i) s.enter(i, 0.0, rng);
    double now = first->completion_time;
    while (s.present() > 0) {
      auto res = s.complete(now, rng);
      if (res.next) {
        now = res.next->completion_time;
        completions.push_back(now);
      }
    }
    return completions;
  };
  CHECK(run(99) == run(99));
  CHECK(run(99) != run(100));
}

TEST_CASE("time-weighted accumulator averages a step function") {
  StatAccumulator acc;
  acc.tw_update(0.0, 2.0);  // value 2 on [0,4)
  acc.tw_update(4.0, 5.0);  // value 5 on [4,10)
  acc.tw_update(10.0, 0.0);
  CHECK(acc.tw_integral == doctest::Approx(2.0 * 4 + 5.0 * 6));
  CHECK(acc.tw_mean(0.0, 10.0) == doctest::Approx(3.8));
}

TEST_CASE("tally variance is the unbiased sample variance, never negative") {
  StatAccumulator acc;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) acc.add(x);
  CHECK(acc.mean() == doctest::Approx(5.0));
  CHECK(acc.variance() == doctest::Approx(32.0 / 7.0));
  StatAccumulator constant;
  constant.add(3.0);
  constant.add(3.0);
  CHECK(constant.variance() >= 0.0);
  StatAccumulator single;
  single.add(1.0);
  CHECK(single.variance() == 0.0);
}
