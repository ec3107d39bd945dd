#pragma once

#include <cmath>
#include <cstdint>

namespace flair {

inline std::uint64_t splitmix64(std::uint64_t& state) {
	state += 0x9e3779b97f4a7c15ULL;
	std::uint64_t z = state;
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

// Seeded counter-free generator (xoshiro256**) with explicit distributions so
// that sample streams are identical across standard-library implementations.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : seed_(seed) {
		std::uint64_t sm = seed;
		for (auto& word : s_) {
			word = splitmix64(sm);
		}
	}

	std::uint64_t next_u64() {
		const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
		const std::uint64_t t = s_[1] << 17;
		s_[2] ^= s_[0];
		s_[3] ^= s_[1];
		s_[1] ^= s_[2];
		s_[0] ^= s_[3];
		s_[2] ^= t;
		s_[3] = rotl(s_[3], 45);
		return result;
	}

	// Uniform on [0, 1) with 53-bit resolution.
	double uniform() {
		return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
	}

	// Standard normal via Box-Muller (cached second draw).
	double normal() {
		if (has_cached_) {
			has_cached_ = false;
			return cached_;
		}
		double u1 = uniform();
		while (u1 <= 0.0) {
			u1 = uniform();
		}
		const double u2 = uniform();
		const double r = std::sqrt(-2.0 * std::log(u1));
		const double theta = 6.283185307179586476925287 * u2;
		cached_ = r * std::sin(theta);
		has_cached_ = true;
		return r * std::cos(theta);
	}

	// Uniform index in [0, n). n must be positive.
	std::size_t index(std::size_t n) {
		return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
	}

	// Deterministic child stream; independent of how much the parent has drawn.
	Rng fork(std::uint64_t stream) const {
		std::uint64_t mix = seed_ ^ (0x9e3779b97f4a7c15ULL + stream * 0xd1342543de82ef95ULL);
		return Rng(splitmix64(mix));
	}

	std::uint64_t seed() const { return seed_; }

private:
	static std::uint64_t rotl(std::uint64_t x, int k) {
		return (x << k) | (x >> (64 - k));
	}

	std::uint64_t seed_;
	std::uint64_t s_[4] = {};
	double cached_ = 0.0;
	bool has_cached_ = false;
};

}  // namespace flair
