/* generated GPU stencil code: template shift */
#include <stdint.h>

/* map 0, region inner */
__global__ void kernel_box3d2r_shift_m0r0(const float * __restrict__ u, float * __restrict__ v) {
    const long q0 = blockIdx.y * blockDim.y;
    const long p0 = q0 + threadIdx.y;
    const long q1 = blockIdx.x * blockDim.x;
    const long p1 = q1 + threadIdx.x;
    const int active = !(p0 >= 12 || p1 >= 12);
    /* streaming window staged through shared memory (5 planes deep) */
    __shared__ float plane_u[5][12][20];
    for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
        for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
            if (q0 + l0 < 16 && q1 + l1 < 16) {
                plane_u[0][l0][l1] = u[(-2 + 2) * 256 + (q0 + l0 - 2 + 2) * 16 + q1 + l1 - 2 + 2];
            }
        }
    }
    for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
        for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
            if (q0 + l0 < 16 && q1 + l1 < 16) {
                plane_u[1][l0][l1] = u[(-1 + 2) * 256 + (q0 + l0 - 2 + 2) * 16 + q1 + l1 - 2 + 2];
            }
        }
    }
    for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
        for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
            if (q0 + l0 < 16 && q1 + l1 < 16) {
                plane_u[2][l0][l1] = u[(0 + 2) * 256 + (q0 + l0 - 2 + 2) * 16 + q1 + l1 - 2 + 2];
            }
        }
    }
    for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
        for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
            if (q0 + l0 < 16 && q1 + l1 < 16) {
                plane_u[3][l0][l1] = u[(1 + 2) * 256 + (q0 + l0 - 2 + 2) * 16 + q1 + l1 - 2 + 2];
            }
        }
    }
    for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
        for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
            if (q0 + l0 < 16 && q1 + l1 < 16) {
                plane_u[4][l0][l1] = u[(2 + 2) * 256 + (q0 + l0 - 2 + 2) * 16 + q1 + l1 - 2 + 2];
            }
        }
    }
    __syncthreads();
    for (long s = 0; s < 12; ++s) {
        if (active) {
            v[(s + 2) * 256 + (p0 + 2) * 16 + p1 + 2] = (float)(0.41032 * plane_u[2][threadIdx.y + 2][threadIdx.x + 2] + 0.16776 * plane_u[0][threadIdx.y + 0][threadIdx.x + 0] + 0.16216 * plane_u[0][threadIdx.y + 0][threadIdx.x + 1] + 0.63093 * plane_u[0][threadIdx.y + 0][threadIdx.x + 2] + 0.453 * plane_u[0][threadIdx.y + 0][threadIdx.x + 3] + 0.62239 * plane_u[0][threadIdx.y + 0][threadIdx.x + 4] + 0.57664 * plane_u[0][threadIdx.y + 1][threadIdx.x + 0] + 0.43537 * plane_u[0][threadIdx.y + 1][threadIdx.x + 1] + 0.78049 * plane_u[0][threadIdx.y + 1][threadIdx.x + 2] + 0.78213 * plane_u[0][threadIdx.y + 1][threadIdx.x + 3] + 0.41193 * plane_u[0][threadIdx.y + 1][threadIdx.x + 4] + 0.35128 * plane_u[0][threadIdx.y + 2][threadIdx.x + 0] + 0.69879 * plane_u[0][threadIdx.y + 2][threadIdx.x + 1] + 0.22212 * plane_u[0][threadIdx.y + 2][threadIdx.x + 2] + 0.45045 * plane_u[0][threadIdx.y + 2][threadIdx.x + 3] + 0.49141 * plane_u[0][threadIdx.y + 2][threadIdx.x + 4] + 0.52278 * plane_u[0][threadIdx.y + 3][threadIdx.x + 0] + 0.47436 * plane_u[0][threadIdx.y + 3][threadIdx.x + 1] + 0.82124 * plane_u[0][threadIdx.y + 3][threadIdx.x + 2] + 0.77648 * plane_u[0][threadIdx.y + 3][threadIdx.x + 3] + 0.64852 * plane_u[0][threadIdx.y + 3][threadIdx.x + 4] + 0.24235 * plane_u[0][threadIdx.y + 4][threadIdx.x + 0] + 0.234 * plane_u[0][threadIdx.y + 4][threadIdx.x + 1] + 0.82722 * plane_u[0][threadIdx.y + 4][threadIdx.x + 2] + 0.86305 * plane_u[0][threadIdx.y + 4][threadIdx.x + 3] + 0.55713 * plane_u[0][threadIdx.y + 4][threadIdx.x + 4] + 0.85015 * plane_u[1][threadIdx.y + 0][threadIdx.x + 0] + 0.16442 * plane_u[1][threadIdx.y + 0][threadIdx.x + 1] + 0.75155 * plane_u[1][threadIdx.y + 0][threadIdx.x + 2] + 0.85526 * plane_u[1][threadIdx.y + 0][threadIdx.x + 3] + 0.11522 * plane_u[1][threadIdx.y + 0][threadIdx.x + 4] + 0.70539 * plane_u[1][threadIdx.y + 1][threadIdx.x + 0] + 0.38793 * plane_u[1][threadIdx.y + 1][threadIdx.x + 1] + 0.51605 * plane_u[1][threadIdx.y + 1][threadIdx.x + 2] + 0.22727 * plane_u[1][threadIdx.y + 1][threadIdx.x + 3] + 0.52429 * plane_u[1][threadIdx.y + 1][threadIdx.x + 4] + 0.67785 * plane_u[1][threadIdx.y + 2][threadIdx.x + 0] + 0.27332 * plane_u[1][threadIdx.y + 2][threadIdx.x + 1] + 0.20759 * plane_u[1][threadIdx.y + 2][threadIdx.x + 2] + 0.94054 * plane_u[1][threadIdx.y + 2][threadIdx.x + 3] + 0.77501 * plane_u[1][threadIdx.y + 2][threadIdx.x + 4] + 0.32724 * plane_u[1][threadIdx.y + 3][threadIdx.x + 0] + 0.05224 * plane_u[1][threadIdx.y + 3][threadIdx.x + 1] + 0.4424 * plane_u[1][threadIdx.y + 3][threadIdx.x + 2] + 0.2432 * plane_u[1][threadIdx.y + 3][threadIdx.x + 3] + 0.05874 * plane_u[1][threadIdx.y + 3][threadIdx.x + 4] + 0.31071 * plane_u[1][threadIdx.y + 4][threadIdx.x + 0] + 0.78013 * plane_u[1][threadIdx.y + 4][threadIdx.x + 1] + 0.36291 * plane_u[1][threadIdx.y + 4][threadIdx.x + 2] + 0.26168 * plane_u[1][threadIdx.y + 4][threadIdx.x + 3] + 0.71035 * plane_u[1][threadIdx.y + 4][threadIdx.x + 4] + 0.57965 * plane_u[2][threadIdx.y + 0][threadIdx.x + 0] + 0.46616 * plane_u[2][threadIdx.y + 0][threadIdx.x + 1] + 0.11324 * plane_u[2][threadIdx.y + 0][threadIdx.x + 2] + 0.50363 * plane_u[2][threadIdx.y + 0][threadIdx.x + 3] + 0.77477 * plane_u[2][threadIdx.y + 0][threadIdx.x + 4] + 0.27428 * plane_u[2][threadIdx.y + 1][threadIdx.x + 0] + 0.60344 * plane_u[2][threadIdx.y + 1][threadIdx.x + 1] + 0.34526 * plane_u[2][threadIdx.y + 1][threadIdx.x + 2] + 0.76576 * plane_u[2][threadIdx.y + 1][threadIdx.x + 3] + 0.37251 * plane_u[2][threadIdx.y + 1][threadIdx.x + 4] + 0.74694 * plane_u[2][threadIdx.y + 2][threadIdx.x + 0] + 0.19682 * plane_u[2][threadIdx.y + 2][threadIdx.x + 1] + 0.36508 * plane_u[2][threadIdx.y + 2][threadIdx.x + 3] + 0.08824 * plane_u[2][threadIdx.y + 2][threadIdx.x + 4] + 0.9217 * plane_u[2][threadIdx.y + 3][threadIdx.x + 0] + 0.07045 * plane_u[2][threadIdx.y + 3][threadIdx.x + 1] + 0.4802 * plane_u[2][threadIdx.y + 3][threadIdx.x + 2] + 0.5106 * plane_u[2][threadIdx.y + 3][threadIdx.x + 3] + 0.90604 * plane_u[2][threadIdx.y + 3][threadIdx.x + 4] + 0.3934 * plane_u[2][threadIdx.y + 4][threadIdx.x + 0] + 0.66832 * plane_u[2][threadIdx.y + 4][threadIdx.x + 1] + 0.78636 * plane_u[2][threadIdx.y + 4][threadIdx.x + 2] + 0.12674 * plane_u[2][threadIdx.y + 4][threadIdx.x + 3] + 0.56033 * plane_u[2][threadIdx.y + 4][threadIdx.x + 4] + 0.05624 * plane_u[3][threadIdx.y + 0][threadIdx.x + 0] + 0.24677 * plane_u[3][threadIdx.y + 0][threadIdx.x + 1] + 0.77254 * plane_u[3][threadIdx.y + 0][threadIdx.x + 2] + 0.10446 * plane_u[3][threadIdx.y + 0][threadIdx.x + 3] + 0.35151 * plane_u[3][threadIdx.y + 0][threadIdx.x + 4] + 0.93976 * plane_u[3][threadIdx.y + 1][threadIdx.x + 0] + 0.34775 * plane_u[3][threadIdx.y + 1][threadIdx.x + 1] + 0.11566 * plane_u[3][threadIdx.y + 1][threadIdx.x + 2] + 0.68437 * plane_u[3][threadIdx.y + 1][threadIdx.x + 3] + 0.15212 * plane_u[3][threadIdx.y + 1][threadIdx.x + 4] + 0.16422 * plane_u[3][threadIdx.y + 2][threadIdx.x + 0] + 0.53112 * plane_u[3][threadIdx.y + 2][threadIdx.x + 1] + 0.66899 * plane_u[3][threadIdx.y + 2][threadIdx.x + 2] + 0.2664 * plane_u[3][threadIdx.y + 2][threadIdx.x + 3] + 0.38661 * plane_u[3][threadIdx.y + 2][threadIdx.x + 4] + 0.05675 * plane_u[3][threadIdx.y + 3][threadIdx.x + 0] + 0.93613 * plane_u[3][threadIdx.y + 3][threadIdx.x + 1] + 0.54532 * plane_u[3][threadIdx.y + 3][threadIdx.x + 2] + 0.86198 * plane_u[3][threadIdx.y + 3][threadIdx.x + 3] + 0.48929 * plane_u[3][threadIdx.y + 3][threadIdx.x + 4] + 0.46888 * plane_u[3][threadIdx.y + 4][threadIdx.x + 0] + 0.80691 * plane_u[3][threadIdx.y + 4][threadIdx.x + 1] + 0.58852 * plane_u[3][threadIdx.y + 4][threadIdx.x + 2] + 0.47668 * plane_u[3][threadIdx.y + 4][threadIdx.x + 3] + 0.27047 * plane_u[3][threadIdx.y + 4][threadIdx.x + 4] + 0.25579 * plane_u[4][threadIdx.y + 0][threadIdx.x + 0] + 0.49321 * plane_u[4][threadIdx.y + 0][threadIdx.x + 1] + 0.20629 * plane_u[4][threadIdx.y + 0][threadIdx.x + 2] + 0.50097 * plane_u[4][threadIdx.y + 0][threadIdx.x + 3] + 0.45302 * plane_u[4][threadIdx.y + 0][threadIdx.x + 4] + 0.1136 * plane_u[4][threadIdx.y + 1][threadIdx.x + 0] + 0.50829 * plane_u[4][threadIdx.y + 1][threadIdx.x + 1] + 0.24445 * plane_u[4][threadIdx.y + 1][threadIdx.x + 2] + 0.68804 * plane_u[4][threadIdx.y + 1][threadIdx.x + 3] + 0.27419 * plane_u[4][threadIdx.y + 1][threadIdx.x + 4] + 0.69013 * plane_u[4][threadIdx.y + 2][threadIdx.x + 0] + 0.37813 * plane_u[4][threadIdx.y + 2][threadIdx.x + 1] + 0.88354 * plane_u[4][threadIdx.y + 2][threadIdx.x + 2] + 0.4037 * plane_u[4][threadIdx.y + 2][threadIdx.x + 3] + 0.07117 * plane_u[4][threadIdx.y + 2][threadIdx.x + 4] + 0.43954 * plane_u[4][threadIdx.y + 3][threadIdx.x + 0] + 0.9088 * plane_u[4][threadIdx.y + 3][threadIdx.x + 1] + 0.89399 * plane_u[4][threadIdx.y + 3][threadIdx.x + 2] + 0.06322 * plane_u[4][threadIdx.y + 3][threadIdx.x + 3] + 0.68951 * plane_u[4][threadIdx.y + 3][threadIdx.x + 4] + 0.38441 * plane_u[4][threadIdx.y + 4][threadIdx.x + 0] + 0.75574 * plane_u[4][threadIdx.y + 4][threadIdx.x + 1] + 0.38306 * plane_u[4][threadIdx.y + 4][threadIdx.x + 2] + 0.08034 * plane_u[4][threadIdx.y + 4][threadIdx.x + 3] + 0.15734 * plane_u[4][threadIdx.y + 4][threadIdx.x + 4]);
        }
        if (s + 1 < 12) {
            __syncthreads();  /* compute done before planes move */
            /* shift the shared planes toward the next plane */
            for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
                for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
                    plane_u[0][l0][l1] = plane_u[1][l0][l1];
                    plane_u[1][l0][l1] = plane_u[2][l0][l1];
                    plane_u[2][l0][l1] = plane_u[3][l0][l1];
                    plane_u[3][l0][l1] = plane_u[4][l0][l1];
                }
            }
            __syncthreads();
            for (long l0 = threadIdx.y; l0 < 12; l0 += blockDim.y) {
                for (long l1 = threadIdx.x; l1 < 20; l1 += blockDim.x) {
                    if (q0 + l0 < 16 && q1 + l1 < 16) {
                        plane_u[4][l0][l1] = u[(s + 3 + 2) * 256 + (q0 + l0 - 2 + 2) * 16 + q1 + l1 - 2 + 2];
                    }
                }
            }
            __syncthreads();
        }
    }
}

/*
 * Host launch stub (documentation only).
 * template=shift block=(16, 8, 8) plane=(32, 32)
 * mem_type=shared prefetch=False async_memcpy=False
 * compute_capability=8.0
 *
 * Launch shape per region: blockDim from the plan, gridDim = ceil of the
 * region extents over the block; the time loop swaps device buffers:
 *
 *   kernel_box3d2r_shift_m0r0<<<grid, block>>>(d_u, d_v);
 *   swap(d_u, d_v);
 */
