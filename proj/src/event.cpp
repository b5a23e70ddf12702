#include "hexcross/event.hpp"

namespace hexcross {

EventPredicate EventPredicate::always() { return {"always", [](const SpinConfig&) { return true; }, true}; }

EventPredicate EventPredicate::face_is(int face, Spin s) {
    return {"face" + std::to_string(face) + (s == Spin::plus ? "+" : "-"),
            [face, s](const SpinConfig& c) { return c.spin(face) == s; }, s == Spin::plus};
}

EventPredicate EventPredicate::all_plus() {
    return {"all+",
            [](const SpinConfig& c) {
                for (int i = 0; i < c.size(); ++i)
                    if (c.spin(i) != Spin::plus) return false;
                return true;
            },
            true};
}

EventPredicate negation(const EventPredicate& a) {
    std::optional<bool> mono;
    if (a.monotone_increasing == true) mono = false;
    return {"not(" + a.name + ")", [f = a.test](const SpinConfig& c) { return !f(c); }, mono};
}

EventPredicate conjunction(const EventPredicate& a, const EventPredicate& b) {
    std::optional<bool> mono;
    if (a.monotone_increasing == true && b.monotone_increasing == true) mono = true;
    return {a.name + "&" + b.name, [f = a.test, g = b.test](const SpinConfig& c) { return f(c) && g(c); }, mono};
}

}  // namespace hexcross
