#include <qsched/model.hpp>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace qsched;
using qsched::fixtures::make_plain_task;
using qsched::fixtures::server_index;

namespace {

Platform reference_platform() { return Platform(fixtures::reference_config().simulation.servers); }

}  // namespace

TEST(Platform, TypesSortedByNameAndServersGrouped) {
    const Platform platform = reference_platform();
    ASSERT_EQ(platform.server_types().size(), 3u);
    EXPECT_EQ(platform.server_types()[0], "cpu_core");
    EXPECT_EQ(platform.server_types()[1], "fft_accel");
    EXPECT_EQ(platform.server_types()[2], "gpu");
    EXPECT_EQ(platform.count(*platform.find_type("cpu_core")), 8u);
    EXPECT_FALSE(platform.find_type("dsp").has_value());

    const auto servers = platform.make_servers();
    ASSERT_EQ(servers.size(), 11u);
    for (std::size_t i = 0; i < servers.size(); ++i) {
        EXPECT_EQ(servers[i].index, i);
        EXPECT_FALSE(servers[i].busy());
    }
    EXPECT_EQ(platform.type_name(servers[8].type), "fft_accel");
    EXPECT_EQ(servers[9].id, 0u);
    EXPECT_EQ(servers[10].id, 1u);
}

TEST(Task, TargetsInPreferenceOrder) {
    const Platform platform = reference_platform();
    const Task fft = make_plain_task(platform, 0, "fft", 0.0, {{"cpu_core", 500}, {"gpu", 100}, {"fft_accel", 10}});
    ASSERT_EQ(fft.targets.size(), 3u);
    EXPECT_EQ(platform.type_name(fft.targets[0].server_type), "fft_accel");
    EXPECT_EQ(platform.type_name(fft.targets[1].server_type), "gpu");
    EXPECT_EQ(platform.type_name(fft.targets[2].server_type), "cpu_core");
    EXPECT_TRUE(fft.supports(*platform.find_type("gpu")));

    const Task decoder = make_plain_task(platform, 1, "decoder", 0.0, {{"cpu_core", 200}, {"gpu", 150}});
    EXPECT_FALSE(decoder.supports(*platform.find_type("fft_accel")));
}

TEST(Task, EqualMeansOrderedByServerType) {
    const Platform platform = reference_platform();
    const Task t = make_plain_task(platform, 0, "x", 0.0, {{"gpu", 5}, {"cpu_core", 5}});
    EXPECT_EQ(platform.type_name(t.targets[0].server_type), "cpu_core");
}

TEST(RemainingBusyTime, IdleServerIsZero) {
    Server s;
    EXPECT_EQ(remaining_busy_time(s, 123.0), 0.0);
}

TEST(RemainingBusyTime, UsesMeanEstimate) {
    Server s;
    s.current_task = 1;
    s.assign_time = 100.0;
    s.current_mean_estimate = 500.0;
    EXPECT_EQ(remaining_busy_time(s, 150.0), 450.0);
}

TEST(RemainingBusyTime, OverrunClampsToZero) {
    Server s;
    s.current_task = 1;
    s.assign_time = 0.0;
    s.current_mean_estimate = 10.0;
    EXPECT_EQ(remaining_busy_time(s, 40.0), 0.0);
}

TEST(AssignTask, CompletionUsesActualServiceTime) {
    const Platform platform = reference_platform();
    auto servers = platform.make_servers();
    Task fft = make_plain_task(platform, 0, "fft", 0.0, {{"cpu_core", 500}, {"gpu", 100}, {"fft_accel", 10}});
    fft.targets[0].actual = 10.2;
    Server& accel = servers[server_index(servers, platform, "fft_accel", 0)];
    EXPECT_EQ(assign_task(accel, fft, 0.0), 10.2);
    EXPECT_TRUE(accel.busy());
    EXPECT_EQ(*accel.current_mean_estimate, 10.0);
    EXPECT_EQ(*fft.schedule_time, 0.0);
    EXPECT_EQ(*fft.assigned_server, accel.ref());
    // The policy sees the mean, not the draw.
    EXPECT_EQ(remaining_busy_time(accel, 4.0), 6.0);
}

TEST(AssignTask, ImmediateServiceHasNoWait) {
    const Platform platform = reference_platform();
    auto servers = platform.make_servers();
    Task decoder = make_plain_task(platform, 0, "decoder", 7.0, {{"cpu_core", 200}, {"gpu", 150}});
    assign_task(servers[server_index(servers, platform, "gpu", 0)], decoder, 7.0);
    EXPECT_EQ(*decoder.schedule_time - decoder.arrival_time, 0.0);
}

TEST(AssignTask, BusyServerIsAPolicyFault) {
    const Platform platform = reference_platform();
    auto servers = platform.make_servers();
    Task a = make_plain_task(platform, 0, "decoder", 0.0, {{"gpu", 150}});
    Task b = make_plain_task(platform, 1, "decoder", 0.0, {{"gpu", 150}});
    Server& gpu = servers[server_index(servers, platform, "gpu", 0)];
    assign_task(gpu, a, 0.0);
    EXPECT_THROW(assign_task(gpu, b, 1.0), PolicyFault);
}

TEST(AssignTask, UnsupportedServerIsAPolicyFault) {
    const Platform platform = reference_platform();
    auto servers = platform.make_servers();
    Task decoder = make_plain_task(platform, 0, "decoder", 0.0, {{"cpu_core", 200}, {"gpu", 150}});
    EXPECT_THROW(assign_task(servers[server_index(servers, platform, "fft_accel", 0)], decoder, 0.0), PolicyFault);
}

TEST(ReleaseServer, ChargesActualTime) {
    const Platform platform = reference_platform();
    auto servers = platform.make_servers();
    Task t = make_plain_task(platform, 0, "decoder", 0.0, {{"gpu", 150}});
    t.targets[0].actual = 151.25;
    Server& gpu = servers[server_index(servers, platform, "gpu", 1)];
    const double done = assign_task(gpu, t, 3.0);
    release_server(gpu, t, done);
    EXPECT_FALSE(gpu.busy());
    EXPECT_EQ(gpu.busy_time_accum.value(), 151.25);
    EXPECT_EQ(gpu.tasks_served, 1u);
    EXPECT_EQ(*t.completion_time, 154.25);
}

TEST(SimClock, NeverMovesBackwards) {
    SimClock clock;
    clock.advance_to(5.0);
    clock.advance_to(5.0);
    EXPECT_EQ(clock.now(), 5.0);
    EXPECT_THROW(clock.advance_to(4.0), std::logic_error);
}
