#ifndef MMV_H
#define MMV_H

/* C interface to the matrix product verification / correction library.
 *
 * All functions return an mmv_status. On failure a thread-local message is
 * available from mmv_last_error() until the next failing call on the same
 * thread. Matrices are opaque handles released with mmv_matrix_free().
 * Row and column indices are 0-based. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MMV_API __declspec(dllexport)
#else
#define MMV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmv_status {
    MMV_OK = 0,
    MMV_ERR_USAGE = 1,      /* bad arguments, dimension mismatch, unreadable path */
    MMV_ERR_PARSE = 2,      /* malformed matrix file */
    MMV_ERR_DOMAIN = 3,     /* arithmetic domain error */
    MMV_ERR_RESOURCE = 4,   /* overflow or budget exceeded */
    MMV_ERR_PROMISE = 5,    /* more than t differences */
    MMV_ERR_VALIDATION = 6, /* malformed circuit or similar structure */
    MMV_ERR_INTERNAL = 7
} mmv_status;

MMV_API const char* mmv_last_error(void);
MMV_API const char* mmv_status_name(mmv_status status);

/* ------------------------------------------------------------ matrices */

typedef struct mmv_matrix mmv_matrix;

MMV_API mmv_status mmv_matrix_create(size_t rows, size_t cols, mmv_matrix** out);
MMV_API mmv_status mmv_matrix_identity(size_t n, mmv_matrix** out);
MMV_API mmv_status mmv_matrix_clone(const mmv_matrix* m, mmv_matrix** out);
MMV_API void mmv_matrix_free(mmv_matrix* m);

/* Text format: "ROWS COLS" header, then one line per row. "-" is stdin/stdout. */
MMV_API mmv_status mmv_matrix_read(const char* path, mmv_matrix** out);
MMV_API mmv_status mmv_matrix_parse(const char* text, mmv_matrix** out);
MMV_API mmv_status mmv_matrix_write(const mmv_matrix* m, const char* path);

MMV_API size_t mmv_matrix_rows(const mmv_matrix* m);
MMV_API size_t mmv_matrix_cols(const mmv_matrix* m);
MMV_API mmv_status mmv_matrix_get(const mmv_matrix* m, size_t i, size_t j, int64_t* out);
MMV_API mmv_status mmv_matrix_set(mmv_matrix* m, size_t i, size_t j, int64_t value);

/* Exact product by the cubic algorithm. */
MMV_API mmv_status mmv_matrix_multiply(const mmv_matrix* a, const mmv_matrix* b, mmv_matrix** out);
/* Number of positions where x and y differ (same shape required). */
MMV_API mmv_status mmv_matrix_count_differences(const mmv_matrix* x, const mmv_matrix* y, size_t* out);

/* Random n x n A, B with entries in [-9, 9] and C = AB with exactly z
 * distinct entries perturbed. b_columns > 0 zeroes all but that many
 * columns of B. */
MMV_API mmv_status mmv_generate(size_t n, size_t z, uint64_t seed, size_t b_columns, mmv_matrix** a,
                                mmv_matrix** b, mmv_matrix** c);

/* ------------------------------------------------------------ verification */

typedef enum mmv_verify_mode {
    MMV_MODE_DET = 0,       /* deterministic, correct when at most t differences */
    MMV_MODE_FREIVALDS = 1, /* random 0/1 vectors, reps rounds */
    MMV_MODE_SAMPLING = 2,  /* det with t = n, then 4n random entries */
    MMV_MODE_FLAWED = 3     /* bilinear form x^T (AB - C) x; misses cancellations */
} mmv_verify_mode;

typedef struct mmv_verify_options {
    mmv_verify_mode mode;
    size_t t;        /* det */
    size_t reps;     /* freivalds */
    uint64_t seed;   /* freivalds, sampling */
    size_t probes;   /* flawed: points r = 1..probes */
} mmv_verify_options;

typedef struct mmv_verify_report {
    int equal; /* 1: "C=AB", 0: "C!=AB" */
    size_t primes_total;
    size_t primes_tested;
    size_t t_used;
    uint64_t evaluations;
    int has_witness; /* det/sampling: prime and least nu exposing the difference */
    uint64_t witness_prime;
    size_t witness_nu;
    int has_entry; /* sampling: entry found by the random stage */
    size_t entry_row;
    size_t entry_col;
    uint64_t flawed_modulus; /* flawed: field used and probe outcome */
    size_t flawed_nonzero;
    size_t flawed_first_nonzero; /* 1-based probe point, 0 if none */
} mmv_verify_report;

MMV_API void mmv_verify_options_init(mmv_verify_options* opts);
MMV_API mmv_status mmv_verify(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c,
                              const mmv_verify_options* opts, mmv_verify_report* report);

/* Values of the flawed bilinear test at the given points over F_modulus
 * (modulus 0 selects 2^31 - 1). */
MMV_API mmv_status mmv_flawed_probe(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c,
                                    const uint64_t* points, size_t count, uint64_t modulus, uint64_t* values);

/* ------------------------------------------------------------ correction */

/* Receives one key=value line per correction. */
typedef void (*mmv_trace_fn)(const char* line, void* user);

typedef struct mmv_correct_report {
    size_t corrections;
    size_t iterations;
    uint64_t evaluations;
    size_t max_tau;
    size_t primes_total;
    size_t engine_runs;
    size_t t_used;
    /* On MMV_ERR_PROMISE: */
    size_t violation_count; /* corrections attempted including the offending one */
    int violation_has_position;
    size_t violation_row;
    size_t violation_col;
} mmv_correct_report;

/* AB from C_in differing in at most t entries. *out receives a new matrix. */
MMV_API mmv_status mmv_correct(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c_in, size_t t,
                               mmv_trace_fn trace, void* user, mmv_matrix** out, mmv_correct_report* report);
/* AB given that it has at most t nonzero entries. */
MMV_API mmv_status mmv_osmm(const mmv_matrix* a, const mmv_matrix* b, size_t t, mmv_trace_fn trace, void* user,
                            mmv_matrix** out, mmv_correct_report* report);

/* ------------------------------------------------------------ reductions */

typedef struct mmv_3sum_report {
    int certificate_ok;
    size_t failure_row; /* first one of C without a witness */
    size_t failure_col;
    size_t witnesses;
    int64_t w;
    size_t s1_size;
    size_t s2_size;
    size_t s3_size;
    int checked;  /* brute force ran */
    int solvable; /* a solution exists: some zero of C is wrong */
    size_t wrong_row;
    size_t wrong_col;
} mmv_3sum_report;

/* Boolean A, B, C. Writes the instance to out_path (NULL: don't write). */
MMV_API mmv_status mmv_reduce_3sum(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c,
                                   const char* out_path, int check, mmv_3sum_report* report);

typedef struct mmv_upit_report {
    uint64_t modulus;
    size_t gates;
    size_t wires;
    size_t wire_limit; /* 8 l m + 64 max(l, m) for l x m A */
    size_t degree;
    int checked;
    size_t probes;
    size_t mismatches; /* circuit vs. direct evaluation of g */
    int identity_decided;
    int is_zero; /* circuit is identically zero over F_modulus */
} mmv_upit_report;

/* Circuit for the fingerprint of AB (c == NULL) or of AB - C. */
MMV_API mmv_status mmv_reduce_upit(const mmv_matrix* a, const mmv_matrix* b, const mmv_matrix* c,
                                   const char* out_path, int check, size_t probes, uint64_t seed,
                                   mmv_upit_report* report);

#ifdef __cplusplus
}
#endif

#endif
