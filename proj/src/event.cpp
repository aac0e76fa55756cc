#include "covsyn/event.hpp"

#include <algorithm>

namespace covsyn {

namespace {

bool bad_plain_name(const std::string& name) {
    if (name.empty() || name == "stop") return true;
    if (name.rfind("cmd{", 0) == 0) return true;
    for (char c : name) {
        if (c == '#' || c == '{' || c == '}' || c == ',' || std::isspace(static_cast<unsigned char>(c)))
            return true;
    }
    return false;
}

} // namespace

Event Event::plain(std::string name, bool controllable, bool observable) {
    if (bad_plain_name(name)) throw Error("bad event name: '" + name + "'");
    auto d = std::make_shared<Data>();
    d->kind = EventKind::plain;
    d->name = std::move(name);
    d->controllable = controllable;
    d->observable = observable;
    Event e;
    e.data_ = std::move(d);
    return e;
}

Event Event::relabeled(const Event& base) {
    if (base.kind() != EventKind::plain)
        throw Error("only plain events can be relabeled: '" + base.name() + "'");
    auto d = std::make_shared<Data>();
    d->kind = EventKind::relabeled;
    d->name = base.name() + "#";
    d->controllable = base.controllable();
    d->observable = base.observable();
    d->base = std::make_shared<const Event>(base);
    Event e;
    e.data_ = std::move(d);
    return e;
}

Event Event::command(std::vector<Event> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::string name = "cmd{";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i].kind() != EventKind::plain)
            throw Error("command members must be plain events: '" + members[i].name() + "'");
        if (i) name += ',';
        name += members[i].name();
    }
    name += '}';
    auto d = std::make_shared<Data>();
    d->kind = EventKind::command;
    d->name = std::move(name);
    d->controllable = true;
    d->observable = true;
    d->members = std::move(members);
    Event e;
    e.data_ = std::move(d);
    return e;
}

Event Event::stop() {
    auto d = std::make_shared<Data>();
    d->kind = EventKind::stop;
    d->name = "stop";
    d->controllable = true;
    d->observable = true;
    Event e;
    e.data_ = std::move(d);
    return e;
}

const Event& Event::base() const {
    const Data& d = data();
    if (d.kind != EventKind::relabeled || !d.base)
        throw Error("event '" + d.name + "' has no base event");
    return *d.base;
}

const std::vector<Event>& Event::members() const {
    const Data& d = data();
    if (d.kind != EventKind::command)
        throw Error("event '" + d.name + "' is not a command");
    return d.members;
}

bool Event::command_contains(const Event& e) const {
    const auto& m = members();
    return std::binary_search(m.begin(), m.end(), e);
}

EventSet::EventSet(std::initializer_list<Event> events) : events_(events) {
    std::sort(events_.begin(), events_.end());
    events_.erase(std::unique(events_.begin(), events_.end()), events_.end());
}

EventSet::EventSet(std::vector<Event> events) : events_(std::move(events)) {
    std::sort(events_.begin(), events_.end());
    events_.erase(std::unique(events_.begin(), events_.end()), events_.end());
}

bool EventSet::contains(const Event& e) const {
    return std::binary_search(events_.begin(), events_.end(), e);
}

void EventSet::insert(const Event& e) {
    auto it = std::lower_bound(events_.begin(), events_.end(), e);
    if (it == events_.end() || *it != e) events_.insert(it, e);
}

bool EventSet::subset_of(const EventSet& other) const {
    return std::includes(other.events_.begin(), other.events_.end(),
                         events_.begin(), events_.end());
}

EventSet set_union(const EventSet& a, const EventSet& b) {
    EventSet r;
    std::set_union(a.events_.begin(), a.events_.end(), b.events_.begin(), b.events_.end(),
                   std::back_inserter(r.events_));
    return r;
}

EventSet set_difference(const EventSet& a, const EventSet& b) {
    EventSet r;
    std::set_difference(a.events_.begin(), a.events_.end(), b.events_.begin(), b.events_.end(),
                        std::back_inserter(r.events_));
    return r;
}

EventSet set_intersection(const EventSet& a, const EventSet& b) {
    EventSet r;
    std::set_intersection(a.events_.begin(), a.events_.end(), b.events_.begin(), b.events_.end(),
                          std::back_inserter(r.events_));
    return r;
}

bool operator==(const EventSet& a, const EventSet& b) {
    return a.events_ == b.events_;
}

} // namespace covsyn
