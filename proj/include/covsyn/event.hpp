#pragma once

#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace covsyn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a construction pipeline cannot proceed (for example no safe
// supervisor exists at all), as opposed to a malformed input.
struct PipelineError : Error {
    using Error::Error;
};

enum class EventKind { plain, relabeled, command, stop };

// Immutable event value with cheap copies. Identity is the canonical name:
// plain events are bare names, relabeled copies end in '#', command events
// print as cmd{a,b,c} with member names sorted, and "stop" is reserved.
// Controllability/observability flags ride along for scenario queries but do
// not take part in identity.
class Event {
public:
    Event() = default;

    static Event plain(std::string name, bool controllable = false, bool observable = true);
    static Event relabeled(const Event& base);
    static Event command(std::vector<Event> members);
    static Event stop();

    bool valid() const { return data_ != nullptr; }
    EventKind kind() const { return data().kind; }
    const std::string& name() const { return data().name; }
    bool controllable() const { return data().controllable; }
    bool observable() const { return data().observable; }

    // relabeled events only
    const Event& base() const;
    // command events only; sorted by name
    const std::vector<Event>& members() const;
    bool command_contains(const Event& e) const;

    friend bool operator==(const Event& a, const Event& b) {
        if (a.data_ == b.data_) return true;
        if (!a.data_ || !b.data_) return false;
        return a.data_->name == b.data_->name;
    }
    friend bool operator!=(const Event& a, const Event& b) { return !(a == b); }
    friend bool operator<(const Event& a, const Event& b) {
        if (!a.data_ || !b.data_) return b.data_ != nullptr && a.data_ == nullptr;
        return a.data_->name < b.data_->name;
    }

private:
    struct Data {
        EventKind kind = EventKind::plain;
        std::string name;
        bool controllable = false;
        bool observable = true;
        std::shared_ptr<const Event> base;
        std::vector<Event> members;
    };

    const Data& data() const {
        if (!data_) throw Error("use of an empty event handle");
        return *data_;
    }

    std::shared_ptr<const Data> data_;
};

// Small sorted set of events. All the pipeline alphabets are tiny, so a
// sorted vector beats anything fancier.
class EventSet {
public:
    EventSet() = default;
    EventSet(std::initializer_list<Event> events);
    explicit EventSet(std::vector<Event> events);

    bool contains(const Event& e) const;
    void insert(const Event& e);
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    auto begin() const { return events_.begin(); }
    auto end() const { return events_.end(); }
    const std::vector<Event>& items() const { return events_; }

    bool subset_of(const EventSet& other) const;

    friend EventSet set_union(const EventSet& a, const EventSet& b);
    friend EventSet set_difference(const EventSet& a, const EventSet& b);
    friend EventSet set_intersection(const EventSet& a, const EventSet& b);
    friend bool operator==(const EventSet& a, const EventSet& b);

private:
    std::vector<Event> events_;
};

} // namespace covsyn
