"""Random-convolution feature transform, njit-compatible source.

These functions are written so the exact same code object runs either
compiled (numba backend) or as plain Python over numpy (fallback backend).
All accumulation runs in a fixed order so the two backends agree
bit-for-bit.

Kernel bank: the 84 three-of-nine kernels (length 9, weights -1 with three
taps raised to +2), dilations spread geometrically up to (L-1)/8, one bias
per feature taken from low-discrepancy quantiles of convolution outputs on
training data, pooled by the proportion of positive values.
"""

from __future__ import annotations

import numpy as np

KERNEL_LENGTH = 9
NUM_KERNELS = 84


def kernel_indices() -> np.ndarray:
    """The C(9,3)=84 tap-position triples, in lexicographic order."""
    out = np.zeros((NUM_KERNELS, 3), dtype=np.int32)
    n = 0
    for a in range(KERNEL_LENGTH):
        for b in range(a + 1, KERNEL_LENGTH):
            for c in range(b + 1, KERNEL_LENGTH):
                out[n, 0] = a
                out[n, 1] = b
                out[n, 2] = c
                n += 1
    return out


def fit_biases_impl(
    X,
    indices,
    num_channels_per_combination,
    channel_indices,
    dilations,
    num_features_per_dilation,
    quantiles,
    example_picks,
):
    """One bias per feature from conv outputs of randomly picked examples.

    X: (num_examples, num_channels, input_length) float32.
    Returns float32 (num_features,).
    """
    num_examples, num_channels, input_length = X.shape
    num_dilations = dilations.shape[0]
    num_features = NUM_KERNELS * int(np.sum(num_features_per_dilation))

    biases = np.zeros(num_features, dtype=np.float32)

    feature_index_start = 0
    combination_index = 0
    num_channels_start = 0

    for dilation_index in range(num_dilations):
        dilation = int(dilations[dilation_index])
        padding = ((KERNEL_LENGTH - 1) * dilation) // 2
        num_features_this_dilation = int(num_features_per_dilation[dilation_index])

        for kernel_index in range(NUM_KERNELS):
            feature_index_end = feature_index_start + num_features_this_dilation

            num_channels_this = int(num_channels_per_combination[combination_index])
            num_channels_end = num_channels_start + num_channels_this
            channels_this = channel_indices[num_channels_start:num_channels_end]

            _X = X[example_picks[combination_index]][channels_this]

            A = -_X
            G = _X + _X + _X

            C_alpha = np.zeros((num_channels_this, input_length), dtype=np.float32)
            C_alpha[:] = A

            C_gamma = np.zeros(
                (KERNEL_LENGTH, num_channels_this, input_length), dtype=np.float32
            )
            C_gamma[KERNEL_LENGTH // 2] = G

            start = dilation
            end = input_length - padding

            for gamma_index in range(KERNEL_LENGTH // 2):
                C_alpha[:, -end:] = C_alpha[:, -end:] + A[:, :end]
                C_gamma[gamma_index][:, -end:] = G[:, :end]
                end += dilation

            for gamma_index in range(KERNEL_LENGTH // 2 + 1, KERNEL_LENGTH):
                C_alpha[:, :-start] = C_alpha[:, :-start] + A[:, start:]
                C_gamma[gamma_index][:, :-start] = G[:, start:]
                start += dilation

            index_0 = indices[kernel_index, 0]
            index_1 = indices[kernel_index, 1]
            index_2 = indices[kernel_index, 2]

            C = np.zeros(input_length, dtype=np.float32)
            for a in range(num_channels_this):
                C += (
                    C_alpha[a] + C_gamma[index_0][a] + C_gamma[index_1][a]
                ) + C_gamma[index_2][a]

            # quantile by linear interpolation on the sorted conv output;
            # manual so both backends share one rounding behavior
            C_sorted = np.sort(C)
            n_sorted = C_sorted.shape[0]
            for feature_count in range(num_features_this_dilation):
                q = float(quantiles[feature_index_start + feature_count])
                pos = q * (n_sorted - 1)
                lo = int(np.floor(pos))
                if lo >= n_sorted - 1:
                    value = float(C_sorted[n_sorted - 1])
                else:
                    frac = pos - lo
                    v_lo = float(C_sorted[lo])
                    v_hi = float(C_sorted[lo + 1])
                    value = v_lo + frac * (v_hi - v_lo)
                biases[feature_index_start + feature_count] = value

            feature_index_start = feature_index_end
            combination_index += 1
            num_channels_start = num_channels_end

    return biases


def transform_impl(
    X,
    indices,
    num_channels_per_combination,
    channel_indices,
    dilations,
    num_features_per_dilation,
    biases,
):
    """PPV features for every example; (num_examples, num_features) float32.

    Padding alternates per (dilation, kernel): even parity pools the full
    zero-padded output, odd parity pools only positions where the kernel
    fits entirely inside the series.
    """
    num_examples, num_channels, input_length = X.shape
    num_dilations = dilations.shape[0]
    num_features = NUM_KERNELS * int(np.sum(num_features_per_dilation))

    features = np.zeros((num_examples, num_features), dtype=np.float32)

    for example_index in range(num_examples):
        _X = X[example_index]

        A = -_X
        G = _X + _X + _X

        feature_index_start = 0
        combination_index = 0
        num_channels_start = 0

        for dilation_index in range(num_dilations):
            _padding0 = dilation_index % 2
            dilation = int(dilations[dilation_index])
            padding = ((KERNEL_LENGTH - 1) * dilation) // 2
            num_features_this_dilation = int(num_features_per_dilation[dilation_index])

            C_alpha = np.zeros((num_channels, input_length), dtype=np.float32)
            C_alpha[:] = A

            C_gamma = np.zeros(
                (KERNEL_LENGTH, num_channels, input_length), dtype=np.float32
            )
            C_gamma[KERNEL_LENGTH // 2] = G

            start = dilation
            end = input_length - padding

            for gamma_index in range(KERNEL_LENGTH // 2):
                C_alpha[:, -end:] = C_alpha[:, -end:] + A[:, :end]
                C_gamma[gamma_index][:, -end:] = G[:, :end]
                end += dilation

            for gamma_index in range(KERNEL_LENGTH // 2 + 1, KERNEL_LENGTH):
                C_alpha[:, :-start] = C_alpha[:, :-start] + A[:, start:]
                C_gamma[gamma_index][:, :-start] = G[:, start:]
                start += dilation

            for kernel_index in range(NUM_KERNELS):
                feature_index_end = feature_index_start + num_features_this_dilation

                _padding1 = (_padding0 + kernel_index) % 2

                num_channels_this = int(
                    num_channels_per_combination[combination_index]
                )
                num_channels_end = num_channels_start + num_channels_this
                channels_this = channel_indices[num_channels_start:num_channels_end]

                index_0 = indices[kernel_index, 0]
                index_1 = indices[kernel_index, 1]
                index_2 = indices[kernel_index, 2]

                C = np.zeros(input_length, dtype=np.float32)
                for a in range(num_channels_this):
                    ch = channels_this[a]
                    C += (
                        C_alpha[ch] + C_gamma[index_0][ch] + C_gamma[index_1][ch]
                    ) + C_gamma[index_2][ch]

                if _padding1 == 0:
                    pooled = C
                else:
                    pooled = C[padding:-padding]
                n_pool = pooled.shape[0]

                for feature_count in range(num_features_this_dilation):
                    bias = biases[feature_index_start + feature_count]
                    count = np.sum(pooled > bias)
                    features[example_index, feature_index_start + feature_count] = (
                        np.float32(count) / np.float32(n_pool)
                    )

                feature_index_start = feature_index_end
                combination_index += 1
                num_channels_start = num_channels_end

    return features
