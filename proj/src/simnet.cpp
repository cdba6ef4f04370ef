// Copyright 2026 The mpflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpflow/simnet.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "mpflow/error.hpp"
#include "mpflow/scheduler.hpp"
#include "mpflow/sockopt.hpp"

namespace mpflow {

Micros rto_interval(Micros srtt, std::uint32_t consecutive_timeouts, Micros rto_min)
{
    const Micros base = std::max(2 * srtt, rto_min);
    return base * (std::int64_t{1} << std::min<std::uint32_t>(consecutive_timeouts, 20));
}

namespace {

using LinkIndex = std::size_t;

struct SegmentArrival {
    SubflowId id;
    std::uint64_t seq;
    LinkIndex link;
    std::uint64_t epoch;
};
struct AckArrival {
    SubflowId id;
    std::uint64_t seq;
    LinkIndex link;
    std::uint64_t epoch;
};
struct RtoFire {
    SubflowId id;
    std::uint64_t generation;
};
struct LinkChange {
    LinkIndex link;
    bool up;
};
struct ActionDue {
    std::size_t index;
};
struct ReestablishAttempt {
    LinkIndex link;
};
struct KeepaliveDue {
    SubflowId id;
};
struct MpPrioArrival {
    MpPrioOption opt;
    SubflowId via;
    LinkIndex link;
    std::uint64_t epoch;
};
struct StartTraffic {};

using Payload = std::variant<SegmentArrival, AckArrival, RtoFire, LinkChange, ActionDue, ReestablishAttempt,
                             KeepaliveDue, MpPrioArrival, StartTraffic>;

struct Event {
    Micros at;
    std::uint64_t order;
    Payload payload;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const
    {
        return a.at != b.at ? a.at > b.at : a.order > b.order;
    }
};

struct LinkRuntime {
    LinkSpec spec;
    Micros busy_until{0};
    std::uint64_t epoch = 0;
};

constexpr std::uint64_t kNoMetaSeq = ~std::uint64_t{0};

struct Outstanding {
    std::uint64_t meta_seq = kNoMetaSeq; // kNoMetaSeq for keepalive probes
    std::uint64_t len = 0;
    Micros first_sent{0};
    bool retransmitted = false;
};

struct FlowRuntime {
    LinkIndex link = 0;
    std::uint64_t next_seq = 0;
    std::map<std::uint64_t, Outstanding> outstanding;
    std::uint64_t rto_generation = 0;
    bool rto_armed = false;
    bool keepalive_pending = false;
    std::vector<std::pair<Micros, bool>> prio_log;
};

std::string ms_text(Micros t)
{
    return std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(t).count()) + " ms";
}

} // namespace

struct Simulator::Impl {
    SimConfig cfg;
    ConnectionState sender;
    ConnectionState receiver;
    std::vector<LinkRuntime> links;
    std::map<std::uint8_t, FlowRuntime> flows;
    std::vector<TimedAction> actions;
    std::vector<GenealogyEntry> genealogy;
    std::vector<std::string> diagnostics;
    std::map<std::pair<std::int64_t, std::uint8_t>, std::uint64_t> acked; // (bucket, id) -> bytes
    std::set<std::uint64_t> requeued;
    std::set<LinkIndex> reestablish_pending;
    std::uint64_t next_meta_seq = 0;

    std::priority_queue<Event, std::vector<Event>, Later> events;
    std::uint64_t next_order = 0;
    Micros now{0};
    Micros reached{0};
    bool started = false;
    bool traffic_started = false;

    Impl(ConnectionState s, std::vector<LinkSpec> link_specs, SimConfig c)
        : cfg(c), sender(std::move(s))
    {
        if (cfg.mss == 0 || cfg.window < cfg.mss || cfg.bucket_ms <= 0) {
            throw Error(ErrorKind::validation, "simulation needs mss > 0, window >= mss and bucket_ms > 0");
        }
        for (auto& spec : link_specs) {
            if (spec.bandwidth_bps == 0) {
                throw Error(ErrorKind::validation, "link " + std::to_string(spec.link_id) + " has zero bandwidth");
            }
            if (spec.one_way_delay < Micros{0}) {
                throw Error(ErrorKind::validation, "link " + std::to_string(spec.link_id) + " has negative delay");
            }
            for (const auto& l : links) {
                if (l.spec.link_id == spec.link_id) {
                    throw Error(ErrorKind::validation, "duplicate link id " + std::to_string(spec.link_id));
                }
                if (l.spec.pair == spec.pair) {
                    throw Error(ErrorKind::validation, "pair " + spec.pair.to_string() + " has more than one link");
                }
            }
            links.push_back(LinkRuntime{std::move(spec)});
        }

        receiver = mirror_connection(sender);
        for (auto& sf : sender.subflows) {
            if (!sf.alive) {
                continue;
            }
            const LinkIndex li = link_for(sf.pair());
            sf.srtt = handshake_rtt(li);
            register_flow(sf, li);
        }
    }

    LinkIndex link_for(const InterfacePair& pair) const
    {
        for (LinkIndex i = 0; i < links.size(); ++i) {
            if (links[i].spec.pair == pair) {
                return i;
            }
        }
        throw Error(ErrorKind::validation, "no link carries pair " + pair.to_string());
    }

    LinkIndex link_by_id(std::uint32_t id) const
    {
        for (LinkIndex i = 0; i < links.size(); ++i) {
            if (links[i].spec.link_id == id) {
                return i;
            }
        }
        throw Error(ErrorKind::validation, "unknown link " + std::to_string(id));
    }

    Micros handshake_rtt(LinkIndex li) const { return 2 * links[li].spec.one_way_delay; }

    void push(Micros at, Payload p) { events.push(Event{at, next_order++, std::move(p)}); }

    void note(const std::string& msg) { diagnostics.push_back("t=" + ms_text(now) + ": " + msg); }

    void register_flow(const SubflowState& sf, LinkIndex li)
    {
        FlowRuntime rt;
        rt.link = li;
        rt.prio_log.emplace_back(now, sf.low_prio);
        flows.emplace(sf.id.value, std::move(rt));
        genealogy.push_back(GenealogyEntry{sf.id, sf.pair(), now, std::nullopt});
        schedule_keepalive(sf.id);
    }

    // --- transmission -----------------------------------------------------

    Micros serialization(const LinkRuntime& link, std::uint64_t len) const
    {
        const std::uint64_t bits = len * 8 * 1'000'000;
        return Micros{static_cast<std::int64_t>((bits + link.spec.bandwidth_bps - 1) / link.spec.bandwidth_bps)};
    }

    void transmit(SubflowId id, std::uint64_t seq, std::uint64_t len)
    {
        const LinkIndex li = flows.at(id.value).link;
        LinkRuntime& link = links[li];
        if (!link.spec.up) {
            return;
        }
        const Micros start = std::max(now, link.busy_until);
        link.busy_until = start + serialization(link, len);
        push(link.busy_until + link.spec.one_way_delay, SegmentArrival{id, seq, li, link.epoch});
    }

    void arm_rto(SubflowId id)
    {
        FlowRuntime& rt = flows.at(id.value);
        const SubflowState& sf = *sender.find(id);
        ++rt.rto_generation;
        rt.rto_armed = true;
        push(now + rto_interval(sf.srtt, sf.consecutive_timeouts, cfg.rto_min), RtoFire{id, rt.rto_generation});
    }

    void disarm_rto(FlowRuntime& rt)
    {
        ++rt.rto_generation;
        rt.rto_armed = false;
    }

    void send_segment(SubflowState& sf, std::uint64_t meta_seq, std::uint64_t len)
    {
        FlowRuntime& rt = flows.at(sf.id.value);
        const std::uint64_t seq = rt.next_seq++;
        rt.outstanding.emplace(seq, Outstanding{meta_seq, len, now, false});
        sf.inflight_bytes += len;
        sf.bytes_sent_total += len;
        transmit(sf.id, seq, len);
        if (!rt.rto_armed) {
            arm_rto(sf.id);
        }
    }

    void pump()
    {
        if (!traffic_started) {
            return;
        }
        // Every send consumes window, so this terminates; the bound only
        // guards against a selector bug turning into a hang.
        for (std::size_t guard = 0; guard < 1'000'000; ++guard) {
            const SchedulerDecision d = select_subflow(sender, cfg.mss, cfg.window);
            if (!d.chosen) {
                return;
            }
            SubflowState& sf = *sender.find(*d.chosen);
            std::uint64_t meta_seq;
            if (!requeued.empty()) {
                meta_seq = *requeued.begin();
                requeued.erase(requeued.begin());
            } else {
                meta_seq = next_meta_seq++;
            }
            send_segment(sf, meta_seq, cfg.mss);
        }
        throw std::logic_error("scheduler did not converge");
    }

    void schedule_keepalive(SubflowId id)
    {
        FlowRuntime& rt = flows.at(id.value);
        if (!rt.keepalive_pending) {
            rt.keepalive_pending = true;
            push(now + cfg.keepalive_interval, KeepaliveDue{id});
        }
    }

    // --- sub-flow lifecycle ---------------------------------------------

    void declare_dead(SubflowState& sf)
    {
        FlowRuntime& rt = flows.at(sf.id.value);
        for (const auto& [seq, o] : rt.outstanding) {
            if (o.meta_seq != kNoMetaSeq) {
                requeued.insert(o.meta_seq);
            }
        }
        rt.outstanding.clear();
        disarm_rto(rt);
        close_subflow(sender, sf.id);
        if (receiver.find_alive(sf.id)) {
            close_subflow(receiver, sf.id);
        }
        for (auto& g : genealogy) {
            if (g.id == sf.id) {
                g.died_at = now;
            }
        }
        note("sub-flow " + std::to_string(sf.id.value) + " declared dead after " +
             std::to_string(sf.consecutive_timeouts) + " timeouts");
        schedule_reestablish(rt.link);
    }

    void schedule_reestablish(LinkIndex li)
    {
        if (reestablish_pending.insert(li).second) {
            push(now + cfg.reestablish_period, ReestablishAttempt{li});
        }
    }

    bool pair_has_alive_subflow(const InterfacePair& pair) const
    {
        return std::any_of(sender.subflows.begin(), sender.subflows.end(),
                           [&](const SubflowState& sf) { return sf.alive && sf.pair() == pair; });
    }

    void reestablish(LinkIndex li)
    {
        const InterfacePair& pair = links[li].spec.pair;
        if (pair_has_alive_subflow(pair)) {
            return;
        }
        const SubflowTuple tuple = make_subflow_tuple(pair.src(), pair.dst(), sender.next_id);
        const SubflowId id = open_subflow(sender, tuple);
        SubflowState& sf = *sender.find(id);
        sf.srtt = handshake_rtt(li);

        // The join carries the backup flag, so the peer starts in agreement.
        const SubflowId peer_id = open_subflow(receiver, tuple.reversed());
        if (peer_id != id) {
            throw std::logic_error("sender and receiver sub-flow ids diverged");
        }
        receiver.find(peer_id)->low_prio = sf.low_prio;

        register_flow(sf, li);
        note("sub-flow " + std::to_string(id.value) + " established on " + pair.to_string() +
             (sf.low_prio ? " as backup" : " as active"));
    }

    // --- event handlers -------------------------------------------------

    void on(const SegmentArrival& e)
    {
        const LinkRuntime& link = links[e.link];
        if (!link.spec.up || link.epoch != e.epoch) {
            return;
        }
        push(now + link.spec.one_way_delay, AckArrival{e.id, e.seq, e.link, e.epoch});
    }

    void on(const AckArrival& e)
    {
        const LinkRuntime& link = links[e.link];
        if (!link.spec.up || link.epoch != e.epoch) {
            return;
        }
        SubflowState* sf = sender.find_alive(e.id);
        if (!sf) {
            return;
        }
        FlowRuntime& rt = flows.at(e.id.value);
        auto it = rt.outstanding.find(e.seq);
        if (it == rt.outstanding.end()) {
            return; // duplicate of a retransmission
        }
        const Outstanding o = it->second;
        rt.outstanding.erase(it);

        sf->inflight_bytes -= o.len;
        if (o.len > 0) {
            acked[{now.count() / (cfg.bucket_ms * 1000), e.id.value}] += o.len;
        }
        if (!o.retransmitted) {
            const Micros sample = now - o.first_sent;
            sf->srtt = sf->srtt == Micros{0} ? sample : sf->srtt + (sample - sf->srtt) / 8;
        }
        sf->consecutive_timeouts = 0;

        if (rt.outstanding.empty()) {
            disarm_rto(rt);
            schedule_keepalive(e.id);
        } else {
            arm_rto(e.id);
        }
    }

    void on(const RtoFire& e)
    {
        auto it = flows.find(e.id.value);
        if (it == flows.end() || it->second.rto_generation != e.generation || !it->second.rto_armed) {
            return;
        }
        handle_rto(e.id);
    }

    void handle_rto(SubflowId id)
    {
        SubflowState* sf = sender.find_alive(id);
        if (!sf) {
            return;
        }
        FlowRuntime& rt = flows.at(id.value);
        rt.rto_armed = false;
        ++sf->consecutive_timeouts;
        if (sf->consecutive_timeouts >= cfg.max_consecutive_timeouts) {
            declare_dead(*sf);
            return;
        }
        for (auto& [seq, o] : rt.outstanding) {
            o.retransmitted = true;
            sf->bytes_sent_total += o.len;
            transmit(id, seq, o.len);
        }
        if (!rt.outstanding.empty()) {
            arm_rto(id);
        }
    }

    void on(const LinkChange& e) { apply_link_state(e.link, e.up); }

    void apply_link_state(LinkIndex li, bool up)
    {
        LinkRuntime& link = links[li];
        if (link.spec.up == up) {
            return;
        }
        link.spec.up = up;
        ++link.epoch;
        link.busy_until = now;
        note("link " + std::to_string(link.spec.link_id) + (up ? " up" : " down"));
    }

    void on(const ActionDue& e) { std::visit([this](const auto& a) { apply(a); }, actions[e.index].action); }

    void apply(const action::SetSubPrio& a)
    {
        for (SubflowId id : a.ids) {
            try {
                set_subflow_priority(sender, {id, a.low_prio});
            } catch (const Error& err) {
                note(std::string("set_sub_prio: ") + err.what());
            }
        }
    }
    void apply(const action::SetActiveList& a) { set_active_interface_list(sender, a.pairs); }
    void apply(const action::SetBackupList& a) { set_backup_interface_list(sender, a.pairs); }
    void apply(const action::EnablePpos& a)
    {
        if (a.pairs.empty()) {
            const InterfacePair first(sender.local_addrs.front(), sender.remote_addrs.front());
            enable_primary_path_only(sender, std::span(&first, 1));
        } else {
            enable_primary_path_only(sender, a.pairs);
        }
    }
    void apply(const action::LinkDown& a)
    {
        for (auto id : a.links) {
            apply_link_state(link_by_id(id), false);
        }
    }
    void apply(const action::LinkUp& a)
    {
        for (auto id : a.links) {
            apply_link_state(link_by_id(id), true);
        }
    }

    void on(const ReestablishAttempt& e)
    {
        reestablish_pending.erase(e.link);
        if (pair_has_alive_subflow(links[e.link].spec.pair)) {
            return;
        }
        if (links[e.link].spec.up) {
            reestablish(e.link);
        } else {
            schedule_reestablish(e.link);
        }
    }

    void on(const KeepaliveDue& e)
    {
        FlowRuntime& rt = flows.at(e.id.value);
        rt.keepalive_pending = false;
        SubflowState* sf = sender.find_alive(e.id);
        if (sf && rt.outstanding.empty()) {
            send_segment(*sf, kNoMetaSeq, 0);
        }
    }

    void on(const MpPrioArrival& e)
    {
        const LinkRuntime& link = links[e.link];
        if (!link.spec.up || link.epoch != e.epoch) {
            note("MP_PRIO for sub-flow " + std::to_string(e.via.value) + " lost on a down link");
            return;
        }
        if (!apply_remote_mp_prio(receiver, e.opt, e.via)) {
            note("MP_PRIO addresses no alive sub-flow; ignored");
        }
    }

    void on(const StartTraffic&) { traffic_started = true; }

    // --- bookkeeping ----------------------------------------------------

    void flush_outbox()
    {
        while (!sender.outbox.empty()) {
            const MpPrioOption opt = sender.outbox.front();
            sender.outbox.pop_front();
            const SubflowId via{opt.addr_id.value_or(0)};
            auto it = flows.find(via.value);
            if (it == flows.end()) {
                continue;
            }
            const LinkRuntime& link = links[it->second.link];
            if (!link.spec.up) {
                note("MP_PRIO for sub-flow " + std::to_string(via.value) + " not sent: link down");
                continue;
            }
            push(now + link.spec.one_way_delay, MpPrioArrival{opt, via, it->second.link, link.epoch});
        }
    }

    void log_priorities()
    {
        for (const auto& sf : sender.subflows) {
            if (!sf.alive) {
                continue;
            }
            auto& log = flows.at(sf.id.value).prio_log;
            if (log.back().second != sf.low_prio) {
                log.emplace_back(now, sf.low_prio);
            }
        }
    }

    void run_until(Micros end)
    {
        if (!started) {
            started = true;
            push(Micros{0}, StartTraffic{});
        }
        while (!events.empty() && events.top().at < end) {
            Event ev = events.top();
            events.pop();
            now = ev.at;
            std::visit([this](const auto& p) { on(p); }, ev.payload);
            flush_outbox();
            pump();
            log_priorities();
        }
        reached = std::max(reached, end);
        now = std::max(now, end);
    }

    bool low_prio_before(SubflowId id, Micros t) const
    {
        const auto& log = flows.at(id.value).prio_log;
        bool value = log.front().second;
        for (const auto& [at, v] : log) {
            if (at >= t) {
                break;
            }
            value = v;
        }
        return value;
    }

    TimelineReport report() const
    {
        TimelineReport r;
        r.bucket_ms = cfg.bucket_ms;
        r.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(reached).count();
        r.diagnostics = diagnostics;
        r.subflow_genealogy = genealogy;
        std::sort(r.subflow_genealogy.begin(), r.subflow_genealogy.end(),
                  [](const GenealogyEntry& a, const GenealogyEntry& b) { return a.id < b.id; });

        const Micros width{cfg.bucket_ms * 1000};
        const std::int64_t n = (reached.count() + width.count() - 1) / width.count();
        for (std::int64_t b = 0; b < n; ++b) {
            const Micros start = b * width;
            const Micros stop = std::min(start + width, reached);
            for (const auto& g : r.subflow_genealogy) {
                if (g.created_at >= stop || (g.died_at && *g.died_at <= start)) {
                    continue;
                }
                TimelineRow row{ThroughputBucket{b * cfg.bucket_ms, g.id, 0}, g.pair, false, false};
                if (auto it = acked.find({b, g.id.value}); it != acked.end()) {
                    row.bucket.bytes_acked = it->second;
                }
                row.low_prio = low_prio_before(g.id, stop);
                row.alive = !g.died_at || *g.died_at >= stop;
                r.rows.push_back(std::move(row));
            }
        }
        return r;
    }
};

Simulator::Simulator(ConnectionState sender, std::vector<LinkSpec> links, SimConfig config)
    : impl_(std::make_unique<Impl>(std::move(sender), std::move(links), config))
{
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

void Simulator::schedule(const TimedAction& a)
{
    if (a.at_ms < 0) {
        throw Error(ErrorKind::validation, "action time must be non-negative");
    }
    auto check_links = [this](const std::vector<std::uint32_t>& ids) {
        for (auto id : ids) {
            impl_->link_by_id(id);
        }
    };
    if (const auto* down = std::get_if<action::LinkDown>(&a.action)) {
        check_links(down->links);
    } else if (const auto* up = std::get_if<action::LinkUp>(&a.action)) {
        check_links(up->links);
    }
    impl_->actions.push_back(a);
    impl_->push(Micros{a.at_ms * 1000}, ActionDue{impl_->actions.size() - 1});
}

void Simulator::set_link_state(std::uint32_t link_id, bool up, Micros at)
{
    const LinkIndex li = impl_->link_by_id(link_id);
    if (at <= impl_->now) {
        impl_->apply_link_state(li, up);
        impl_->pump();
    } else {
        impl_->push(at, LinkChange{li, up});
    }
}

void Simulator::run_until(Micros end) { impl_->run_until(end); }

void Simulator::handle_rto(SubflowId id)
{
    impl_->handle_rto(id);
    impl_->pump();
}

Micros Simulator::now() const { return impl_->now; }
const ConnectionState& Simulator::sender() const { return impl_->sender; }
const ConnectionState& Simulator::receiver() const { return impl_->receiver; }
const SimConfig& Simulator::config() const { return impl_->cfg; }
TimelineReport Simulator::report() const { return impl_->report(); }

TimelineReport run(ConnectionState sender, std::vector<LinkSpec> links, std::span<const TimedAction> actions,
                   Micros duration, SimConfig config)
{
    if (duration <= Micros{0}) {
        throw Error(ErrorKind::validation, "duration must be positive");
    }
    Simulator sim(std::move(sender), std::move(links), config);
    for (const auto& a : actions) {
        sim.schedule(a);
    }
    sim.run_until(duration);
    return sim.report();
}

} // namespace mpflow
