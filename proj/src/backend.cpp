#include "mixenc/backend.hpp"

#include <atomic>
#include <thread>

namespace mixenc::backend {

std::vector<CallResult> complete_many(ChatBackend& backend,
                                      const std::vector<ChatRequest>& requests,
                                      int parallelism) {
    if (requests.empty()) {
        throw std::invalid_argument("complete_many needs at least one request");
    }
    if (parallelism < 1) parallelism = 1;

    std::vector<CallResult> results(requests.size());
    auto run_one = [&](std::size_t index) {
        CallResult& slot = results[index];
        try {
            slot.response = backend.complete(requests[index]);
            slot.ok = true;
        } catch (const BackendError& e) {
            slot.ok = false;
            slot.error = e.what();
            slot.error_kind = e.kind();
        } catch (const std::exception& e) {
            slot.ok = false;
            slot.error = e.what();
            slot.error_kind = ErrorKind::Unavailable;
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(parallelism), requests.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < requests.size(); ++i) run_one(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t index = next.fetch_add(1);
                if (index >= requests.size()) break;
                run_one(index);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace mixenc::backend
