/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Points the hierarchy examined and returned for the stripe.
     */
    hier_counts(angle: number, lower: number, upper: number): Uint32Array;
    /**
     * Every ball of the hierarchy as (layer, x, y, radius, state) records.
     * State 2: tested and reaches the stripe; 1: tested and pruned;
     * 0: never tested because an ancestor was pruned.
     */
    hier_trace(angle: number, lower: number, upper: number): Float64Array;
    is_empty(): boolean;
    /**
     * Id of the rank-`i` point for the direction at `angle` radians.
     */
    kth(angle: number, i: number): number;
    len(): number;
    /**
     * Level `k` as interleaved (angle, id) pairs: from each angle on, the
     * rank-`k` point is `id`.
     */
    level(k: number): Float64Array;
    /**
     * `n` uniform points in the unit square.
     */
    constructor(n: number, seed: number, epsilon: number);
    /**
     * Interleaved x, y coordinates.
     */
    points(): Float64Array;
    /**
     * Stripe and candidate set the sample gives for rank `i`, plus the
     * exact answer.
     */
    rank_query(angle: number, i: number): RankQuery;
    sample_ids(): Uint32Array;
}

/**
 * Result of a sample-driven rank query.
 */
export class RankQuery {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The exact rank-i point.
     */
    readonly answer: number;
    /**
     * Stripe attempts the exact query needed (0 means it fell back to a scan).
     */
    readonly attempts: number;
    readonly guaranteed: boolean;
    readonly ids: Uint32Array;
    /**
     * Score bounds of the stripe. Unbounded sides come back as ±Infinity.
     */
    readonly lower: number;
    readonly sample_size: number;
    readonly upper: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_rankquery_free: (a: number, b: number) => void;
    readonly demo_hier_counts: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_hier_trace: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_is_empty: (a: number) => number;
    readonly demo_kth: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_len: (a: number) => number;
    readonly demo_level: (a: number, b: number) => [number, number, number, number];
    readonly demo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_points: (a: number) => [number, number];
    readonly demo_rank_query: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_sample_ids: (a: number) => [number, number];
    readonly rankquery_answer: (a: number) => number;
    readonly rankquery_attempts: (a: number) => number;
    readonly rankquery_guaranteed: (a: number) => number;
    readonly rankquery_ids: (a: number) => [number, number];
    readonly rankquery_lower: (a: number) => number;
    readonly rankquery_sample_size: (a: number) => number;
    readonly rankquery_upper: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
