/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_rankquery_free: (a: number, b: number) => void;
export const demo_hier_counts: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const demo_hier_trace: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const demo_is_empty: (a: number) => number;
export const demo_kth: (a: number, b: number, c: number) => [number, number, number];
export const demo_len: (a: number) => number;
export const demo_level: (a: number, b: number) => [number, number, number, number];
export const demo_new: (a: number, b: number, c: number) => [number, number, number];
export const demo_points: (a: number) => [number, number];
export const demo_rank_query: (a: number, b: number, c: number) => [number, number, number];
export const demo_sample_ids: (a: number) => [number, number];
export const rankquery_answer: (a: number) => number;
export const rankquery_attempts: (a: number) => number;
export const rankquery_guaranteed: (a: number) => number;
export const rankquery_ids: (a: number) => [number, number];
export const rankquery_lower: (a: number) => number;
export const rankquery_sample_size: (a: number) => number;
export const rankquery_upper: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
