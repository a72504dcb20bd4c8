/* generated GPU stencil code: template smem */
#include <stdint.h>
#include <cuda_pipeline.h>

/* map 0, region inner */
__global__ void kernel_box3d2r_smem_m0r0(const float * __restrict__ u, float * __restrict__ v) {
    __shared__ float tile_u[12][12][20];
    const long o0 = 0 + blockIdx.z * blockDim.z;
    const long o1 = 0 + blockIdx.y * blockDim.y;
    const long o2 = 0 + blockIdx.x * blockDim.x;
    /* pipelined copy of the shared tiles */
    for (long l0 = threadIdx.z; l0 < 12; l0 += blockDim.z) {
        for (long l1 = threadIdx.y; l1 < 12; l1 += blockDim.y) {
            for (long l2 = threadIdx.x; l2 < 20; l2 += blockDim.x) {
                if (o0 + l0 < 16 && o1 + l1 < 16 && o2 + l2 < 16) {
                    __pipeline_memcpy_async(&tile_u[l0][l1][l2], &u[(o0 + l0 - 2 + 2) * 256 + (o1 + l1 - 2 + 2) * 16 + o2 + l2 - 2 + 2], sizeof(float));
                }
            }
        }
    }
    __pipeline_commit();
    __pipeline_wait_prior(0);
    __syncthreads();  /* tile fully loaded */
    const long i0 = o0 + threadIdx.z;
    const long i1 = o1 + threadIdx.y;
    const long i2 = o2 + threadIdx.x;
    if (i0 >= 12 || i1 >= 12 || i2 >= 12) return;  /* clamp partial blocks */
    v[(i0 + 2) * 256 + (i1 + 2) * 16 + i2 + 2] = (float)(0.41032 * tile_u[threadIdx.z + 2][threadIdx.y + 2][threadIdx.x + 2] + 0.16776 * tile_u[threadIdx.z + 0][threadIdx.y + 0][threadIdx.x + 0] + 0.16216 * tile_u[threadIdx.z + 0][threadIdx.y + 0][threadIdx.x + 1] + 0.63093 * tile_u[threadIdx.z + 0][threadIdx.y + 0][threadIdx.x + 2] + 0.453 * tile_u[threadIdx.z + 0][threadIdx.y + 0][threadIdx.x + 3] + 0.62239 * tile_u[threadIdx.z + 0][threadIdx.y + 0][threadIdx.x + 4] + 0.57664 * tile_u[threadIdx.z + 0][threadIdx.y + 1][threadIdx.x + 0] + 0.43537 * tile_u[threadIdx.z + 0][threadIdx.y + 1][threadIdx.x + 1] + 0.78049 * tile_u[threadIdx.z + 0][threadIdx.y + 1][threadIdx.x + 2] + 0.78213 * tile_u[threadIdx.z + 0][threadIdx.y + 1][threadIdx.x + 3] + 0.41193 * tile_u[threadIdx.z + 0][threadIdx.y + 1][threadIdx.x + 4] + 0.35128 * tile_u[threadIdx.z + 0][threadIdx.y + 2][threadIdx.x + 0] + 0.69879 * tile_u[threadIdx.z + 0][threadIdx.y + 2][threadIdx.x + 1] + 0.22212 * tile_u[threadIdx.z + 0][threadIdx.y + 2][threadIdx.x + 2] + 0.45045 * tile_u[threadIdx.z + 0][threadIdx.y + 2][threadIdx.x + 3] + 0.49141 * tile_u[threadIdx.z + 0][threadIdx.y + 2][threadIdx.x + 4] + 0.52278 * tile_u[threadIdx.z + 0][threadIdx.y + 3][threadIdx.x + 0] + 0.47436 * tile_u[threadIdx.z + 0][threadIdx.y + 3][threadIdx.x + 1] + 0.82124 * tile_u[threadIdx.z + 0][threadIdx.y + 3][threadIdx.x + 2] + 0.77648 * tile_u[threadIdx.z + 0][threadIdx.y + 3][threadIdx.x + 3] + 0.64852 * tile_u[threadIdx.z + 0][threadIdx.y + 3][threadIdx.x + 4] + 0.24235 * tile_u[threadIdx.z + 0][threadIdx.y + 4][threadIdx.x + 0] + 0.234 * tile_u[threadIdx.z + 0][threadIdx.y + 4][threadIdx.x + 1] + 0.82722 * tile_u[threadIdx.z + 0][threadIdx.y + 4][threadIdx.x + 2] + 0.86305 * tile_u[threadIdx.z + 0][threadIdx.y + 4][threadIdx.x + 3] + 0.55713 * tile_u[threadIdx.z + 0][threadIdx.y + 4][threadIdx.x + 4] + 0.85015 * tile_u[threadIdx.z + 1][threadIdx.y + 0][threadIdx.x + 0] + 0.16442 * tile_u[threadIdx.z + 1][threadIdx.y + 0][threadIdx.x + 1] + 0.75155 * tile_u[threadIdx.z + 1][threadIdx.y + 0][threadIdx.x + 2] + 0.85526 * tile_u[threadIdx.z + 1][threadIdx.y + 0][threadIdx.x + 3] + 0.11522 * tile_u[threadIdx.z + 1][threadIdx.y + 0][threadIdx.x + 4] + 0.70539 * tile_u[threadIdx.z + 1][threadIdx.y + 1][threadIdx.x + 0] + 0.38793 * tile_u[threadIdx.z + 1][threadIdx.y + 1][threadIdx.x + 1] + 0.51605 * tile_u[threadIdx.z + 1][threadIdx.y + 1][threadIdx.x + 2] + 0.22727 * tile_u[threadIdx.z + 1][threadIdx.y + 1][threadIdx.x + 3] + 0.52429 * tile_u[threadIdx.z + 1][threadIdx.y + 1][threadIdx.x + 4] + 0.67785 * tile_u[threadIdx.z + 1][threadIdx.y + 2][threadIdx.x + 0] + 0.27332 * tile_u[threadIdx.z + 1][threadIdx.y + 2][threadIdx.x + 1] + 0.20759 * tile_u[threadIdx.z + 1][threadIdx.y + 2][threadIdx.x + 2] + 0.94054 * tile_u[threadIdx.z + 1][threadIdx.y + 2][threadIdx.x + 3] + 0.77501 * tile_u[threadIdx.z + 1][threadIdx.y + 2][threadIdx.x + 4] + 0.32724 * tile_u[threadIdx.z + 1][threadIdx.y + 3][threadIdx.x + 0] + 0.05224 * tile_u[threadIdx.z + 1][threadIdx.y + 3][threadIdx.x + 1] + 0.4424 * tile_u[threadIdx.z + 1][threadIdx.y + 3][threadIdx.x + 2] + 0.2432 * tile_u[threadIdx.z + 1][threadIdx.y + 3][threadIdx.x + 3] + 0.05874 * tile_u[threadIdx.z + 1][threadIdx.y + 3][threadIdx.x + 4] + 0.31071 * tile_u[threadIdx.z + 1][threadIdx.y + 4][threadIdx.x + 0] + 0.78013 * tile_u[threadIdx.z + 1][threadIdx.y + 4][threadIdx.x + 1] + 0.36291 * tile_u[threadIdx.z + 1][threadIdx.y + 4][threadIdx.x + 2] + 0.26168 * tile_u[threadIdx.z + 1][threadIdx.y + 4][threadIdx.x + 3] + 0.71035 * tile_u[threadIdx.z + 1][threadIdx.y + 4][threadIdx.x + 4] + 0.57965 * tile_u[threadIdx.z + 2][threadIdx.y + 0][threadIdx.x + 0] + 0.46616 * tile_u[threadIdx.z + 2][threadIdx.y + 0][threadIdx.x + 1] + 0.11324 * tile_u[threadIdx.z + 2][threadIdx.y + 0][threadIdx.x + 2] + 0.50363 * tile_u[threadIdx.z + 2][threadIdx.y + 0][threadIdx.x + 3] + 0.77477 * tile_u[threadIdx.z + 2][threadIdx.y + 0][threadIdx.x + 4] + 0.27428 * tile_u[threadIdx.z + 2][threadIdx.y + 1][threadIdx.x + 0] + 0.60344 * tile_u[threadIdx.z + 2][threadIdx.y + 1][threadIdx.x + 1] + 0.34526 * tile_u[threadIdx.z + 2][threadIdx.y + 1][threadIdx.x + 2] + 0.76576 * tile_u[threadIdx.z + 2][threadIdx.y + 1][threadIdx.x + 3] + 0.37251 * tile_u[threadIdx.z + 2][threadIdx.y + 1][threadIdx.x + 4] + 0.74694 * tile_u[threadIdx.z + 2][threadIdx.y + 2][threadIdx.x + 0] + 0.19682 * tile_u[threadIdx.z + 2][threadIdx.y + 2][threadIdx.x + 1] + 0.36508 * tile_u[threadIdx.z + 2][threadIdx.y + 2][threadIdx.x + 3] + 0.08824 * tile_u[threadIdx.z + 2][threadIdx.y + 2][threadIdx.x + 4] + 0.9217 * tile_u[threadIdx.z + 2][threadIdx.y + 3][threadIdx.x + 0] + 0.07045 * tile_u[threadIdx.z + 2][threadIdx.y + 3][threadIdx.x + 1] + 0.4802 * tile_u[threadIdx.z + 2][threadIdx.y + 3][threadIdx.x + 2] + 0.5106 * tile_u[threadIdx.z + 2][threadIdx.y + 3][threadIdx.x + 3] + 0.90604 * tile_u[threadIdx.z + 2][threadIdx.y + 3][threadIdx.x + 4] + 0.3934 * tile_u[threadIdx.z + 2][threadIdx.y + 4][threadIdx.x + 0] + 0.66832 * tile_u[threadIdx.z + 2][threadIdx.y + 4][threadIdx.x + 1] + 0.78636 * tile_u[threadIdx.z + 2][threadIdx.y + 4][threadIdx.x + 2] + 0.12674 * tile_u[threadIdx.z + 2][threadIdx.y + 4][threadIdx.x + 3] + 0.56033 * tile_u[threadIdx.z + 2][threadIdx.y + 4][threadIdx.x + 4] + 0.05624 * tile_u[threadIdx.z + 3][threadIdx.y + 0][threadIdx.x + 0] + 0.24677 * tile_u[threadIdx.z + 3][threadIdx.y + 0][threadIdx.x + 1] + 0.77254 * tile_u[threadIdx.z + 3][threadIdx.y + 0][threadIdx.x + 2] + 0.10446 * tile_u[threadIdx.z + 3][threadIdx.y + 0][threadIdx.x + 3] + 0.35151 * tile_u[threadIdx.z + 3][threadIdx.y + 0][threadIdx.x + 4] + 0.93976 * tile_u[threadIdx.z + 3][threadIdx.y + 1][threadIdx.x + 0] + 0.34775 * tile_u[threadIdx.z + 3][threadIdx.y + 1][threadIdx.x + 1] + 0.11566 * tile_u[threadIdx.z + 3][threadIdx.y + 1][threadIdx.x + 2] + 0.68437 * tile_u[threadIdx.z + 3][threadIdx.y + 1][threadIdx.x + 3] + 0.15212 * tile_u[threadIdx.z + 3][threadIdx.y + 1][threadIdx.x + 4] + 0.16422 * tile_u[threadIdx.z + 3][threadIdx.y + 2][threadIdx.x + 0] + 0.53112 * tile_u[threadIdx.z + 3][threadIdx.y + 2][threadIdx.x + 1] + 0.66899 * tile_u[threadIdx.z + 3][threadIdx.y + 2][threadIdx.x + 2] + 0.2664 * tile_u[threadIdx.z + 3][threadIdx.y + 2][threadIdx.x + 3] + 0.38661 * tile_u[threadIdx.z + 3][threadIdx.y + 2][threadIdx.x + 4] + 0.05675 * tile_u[threadIdx.z + 3][threadIdx.y + 3][threadIdx.x + 0] + 0.93613 * tile_u[threadIdx.z + 3][threadIdx.y + 3][threadIdx.x + 1] + 0.54532 * tile_u[threadIdx.z + 3][threadIdx.y + 3][threadIdx.x + 2] + 0.86198 * tile_u[threadIdx.z + 3][threadIdx.y + 3][threadIdx.x + 3] + 0.48929 * tile_u[threadIdx.z + 3][threadIdx.y + 3][threadIdx.x + 4] + 0.46888 * tile_u[threadIdx.z + 3][threadIdx.y + 4][threadIdx.x + 0] + 0.80691 * tile_u[threadIdx.z + 3][threadIdx.y + 4][threadIdx.x + 1] + 0.58852 * tile_u[threadIdx.z + 3][threadIdx.y + 4][threadIdx.x + 2] + 0.47668 * tile_u[threadIdx.z + 3][threadIdx.y + 4][threadIdx.x + 3] + 0.27047 * tile_u[threadIdx.z + 3][threadIdx.y + 4][threadIdx.x + 4] + 0.25579 * tile_u[threadIdx.z + 4][threadIdx.y + 0][threadIdx.x + 0] + 0.49321 * tile_u[threadIdx.z + 4][threadIdx.y + 0][threadIdx.x + 1] + 0.20629 * tile_u[threadIdx.z + 4][threadIdx.y + 0][threadIdx.x + 2] + 0.50097 * tile_u[threadIdx.z + 4][threadIdx.y + 0][threadIdx.x + 3] + 0.45302 * tile_u[threadIdx.z + 4][threadIdx.y + 0][threadIdx.x + 4] + 0.1136 * tile_u[threadIdx.z + 4][threadIdx.y + 1][threadIdx.x + 0] + 0.50829 * tile_u[threadIdx.z + 4][threadIdx.y + 1][threadIdx.x + 1] + 0.24445 * tile_u[threadIdx.z + 4][threadIdx.y + 1][threadIdx.x + 2] + 0.68804 * tile_u[threadIdx.z + 4][threadIdx.y + 1][threadIdx.x + 3] + 0.27419 * tile_u[threadIdx.z + 4][threadIdx.y + 1][threadIdx.x + 4] + 0.69013 * tile_u[threadIdx.z + 4][threadIdx.y + 2][threadIdx.x + 0] + 0.37813 * tile_u[threadIdx.z + 4][threadIdx.y + 2][threadIdx.x + 1] + 0.88354 * tile_u[threadIdx.z + 4][threadIdx.y + 2][threadIdx.x + 2] + 0.4037 * tile_u[threadIdx.z + 4][threadIdx.y + 2][threadIdx.x + 3] + 0.07117 * tile_u[threadIdx.z + 4][threadIdx.y + 2][threadIdx.x + 4] + 0.43954 * tile_u[threadIdx.z + 4][threadIdx.y + 3][threadIdx.x + 0] + 0.9088 * tile_u[threadIdx.z + 4][threadIdx.y + 3][threadIdx.x + 1] + 0.89399 * tile_u[threadIdx.z + 4][threadIdx.y + 3][threadIdx.x + 2] + 0.06322 * tile_u[threadIdx.z + 4][threadIdx.y + 3][threadIdx.x + 3] + 0.68951 * tile_u[threadIdx.z + 4][threadIdx.y + 3][threadIdx.x + 4] + 0.38441 * tile_u[threadIdx.z + 4][threadIdx.y + 4][threadIdx.x + 0] + 0.75574 * tile_u[threadIdx.z + 4][threadIdx.y + 4][threadIdx.x + 1] + 0.38306 * tile_u[threadIdx.z + 4][threadIdx.y + 4][threadIdx.x + 2] + 0.08034 * tile_u[threadIdx.z + 4][threadIdx.y + 4][threadIdx.x + 3] + 0.15734 * tile_u[threadIdx.z + 4][threadIdx.y + 4][threadIdx.x + 4]);
}

/*
 * Host launch stub (documentation only).
 * template=smem block=(16, 8, 8) plane=(32, 32)
 * mem_type=shared prefetch=False async_memcpy=True
 * compute_capability=8.0
 *
 * Launch shape per region: blockDim from the plan, gridDim = ceil of the
 * region extents over the block; the time loop swaps device buffers:
 *
 *   kernel_box3d2r_smem_m0r0<<<grid, block>>>(d_u, d_v);
 *   swap(d_u, d_v);
 */
