#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace flair {

// Run fn(i) for i in [0, n) on up to n_threads workers. Results must be
// written by index so output order stays independent of scheduling. The
// first exception thrown by any worker is rethrown on the caller.
inline void parallel_for_indexed(std::size_t n, const std::function<void(std::size_t)>& fn,
                                 unsigned n_threads = 0) {
	if (n == 0) return;
	if (n_threads == 0) {
		n_threads = std::thread::hardware_concurrency();
		if (n_threads == 0) n_threads = 1;
	}
	n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
	if (n_threads <= 1) {
		for (std::size_t i = 0; i < n; ++i) fn(i);
		return;
	}

	std::atomic<std::size_t> next{0};
	std::exception_ptr first_error;
	std::mutex error_mutex;
	std::vector<std::thread> workers;
	workers.reserve(n_threads);
	for (unsigned t = 0; t < n_threads; ++t) {
		workers.emplace_back([&]() {
			for (;;) {
				const std::size_t i = next.fetch_add(1);
				if (i >= n) return;
				try {
					fn(i);
				} catch (...) {
					std::lock_guard<std::mutex> lock(error_mutex);
					if (!first_error) first_error = std::current_exception();
					return;
				}
			}
		});
	}
	for (auto& w : workers) w.join();
	if (first_error) std::rethrow_exception(first_error);
}

}  // namespace flair
