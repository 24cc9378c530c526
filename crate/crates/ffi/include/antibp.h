#ifndef ANTIBP_H
#define ANTIBP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum AbpStatus {
  ABP_STATUS_OK = 0,
  ABP_STATUS_NULL_POINTER = 1,
  ABP_STATUS_INVALID_ARGUMENT = 2,
  ABP_STATUS_PARSE_ERROR = 3,
  ABP_STATUS_NUMERICAL = 4,
  ABP_STATUS_BUFFER_TOO_SMALL = 5,
  ABP_STATUS_PANIC = 6,
} AbpStatus;

// Opaque parameterized circuit.
typedef struct AbpCircuit AbpCircuit;

// Opaque Pauli-sum Hamiltonian.
typedef struct AbpHamiltonian AbpHamiltonian;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length excluding the NUL.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t abp_last_error_message(char *buf, size_t len);

// Parses `<coefficient> <pauli-string>` lines.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum AbpStatus abp_hamiltonian_parse(const char *text, struct AbpHamiltonian **out);

// Open-chain transverse-field Ising model.
//
// # Safety
// `out` must be writable.
enum AbpStatus abp_hamiltonian_tfim(size_t n,
                                    double coupling,
                                    double field,
                                    struct AbpHamiltonian **out);

// # Safety
// `h` must be null or a handle from this library not yet freed.
void abp_hamiltonian_free(struct AbpHamiltonian *h);

// # Safety
// Pointers must be valid.
enum AbpStatus abp_hamiltonian_n_qubits(const struct AbpHamiltonian *h, size_t *n);

// Exact ground energy by dense diagonalization (at most 12 qubits).
//
// # Safety
// Pointers must be valid.
enum AbpStatus abp_hamiltonian_ground_energy(const struct AbpHamiltonian *h, double *energy);

// Seeded random layered ansatz of `depth` layers.
//
// # Safety
// `out` must be writable.
enum AbpStatus abp_circuit_random_layered(size_t n,
                                          size_t depth,
                                          uint64_t seed,
                                          struct AbpCircuit **out);

// Parses the line-oriented circuit text format.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum AbpStatus abp_circuit_parse(const char *text, struct AbpCircuit **out);

// # Safety
// `c` must be null or a handle from this library not yet freed.
void abp_circuit_free(struct AbpCircuit *c);

// # Safety
// Pointers must be valid.
enum AbpStatus abp_circuit_n_slots(const struct AbpCircuit *c, size_t *n);

// # Safety
// Pointers must be valid.
enum AbpStatus abp_circuit_gate_counts(const struct AbpCircuit *c, size_t *n_1q, size_t *n_2q);

// Default angles for `c` drawn from `seed`, written to `angles[0..n_slots]`.
//
// # Safety
// `angles` must point to `len` writable doubles.
enum AbpStatus abp_init_angles(const struct AbpCircuit *c,
                               uint64_t seed,
                               double *angles,
                               size_t len);

// `<psi(angles)|H|psi(angles)>` on the noiseless statevector.
//
// # Safety
// `angles` must point to `n_angles` doubles; other pointers must be valid.
enum AbpStatus abp_expectation(const struct AbpCircuit *c,
                               const struct AbpHamiltonian *h,
                               const double *angles,
                               size_t n_angles,
                               double *energy);

// Exact per-slot gradient, written to `grad[0..n_slots]`.
//
// # Safety
// `angles` must point to `n_angles` doubles and `grad` to `grad_len` writable doubles.
enum AbpStatus abp_adjoint_gradient(const struct AbpCircuit *c,
                                    const struct AbpHamiltonian *h,
                                    const double *angles,
                                    size_t n_angles,
                                    double *grad,
                                    size_t grad_len);

// Trajectory estimate of the energy under per-gate depolarizing noise.
//
// # Safety
// `angles` must point to `n_angles` doubles; other pointers must be valid.
enum AbpStatus abp_noisy_expectation(const struct AbpCircuit *c,
                                     const struct AbpHamiltonian *h,
                                     const double *angles,
                                     size_t n_angles,
                                     double p_1q,
                                     double p_2q,
                                     size_t trajectories,
                                     uint64_t seed,
                                     double *mean,
                                     double *stderr);

// Noiseless gated training, pruning and fine-tuning of `c`.
// On success `*pruned` receives a new circuit handle and `*energy` the
// best fine-tuned energy. Zero epoch counts keep the library defaults.
//
// # Safety
// Pointers must be valid.
enum AbpStatus abp_antibp_run(const struct AbpCircuit *c,
                              const struct AbpHamiltonian *h,
                              uint64_t seed,
                              size_t stage1_epochs,
                              size_t stage2_epochs,
                              double learning_rate,
                              struct AbpCircuit **pruned,
                              double *energy);

// Library version as a static NUL-terminated string.
const char *abp_version(void);

// Non-zero when `status` is [`AbpStatus::Ok`].
int abp_status_ok(enum AbpStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTIBP_H */
