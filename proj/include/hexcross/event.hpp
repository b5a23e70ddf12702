#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hexcross/spin_config.hpp"

namespace hexcross {

// Named, pure boolean function of a spin configuration.
struct EventPredicate {
    std::string name;
    std::function<bool(const SpinConfig&)> test;
    // Declared monotonicity; checkers verify it rather than trust it.
    std::optional<bool> monotone_increasing;

    bool operator()(const SpinConfig& c) const { return test(c); }

    static EventPredicate always();
    static EventPredicate face_is(int face, Spin s = Spin::plus);
    static EventPredicate all_plus();
};

EventPredicate negation(const EventPredicate& a);
EventPredicate conjunction(const EventPredicate& a, const EventPredicate& b);

}  // namespace hexcross
