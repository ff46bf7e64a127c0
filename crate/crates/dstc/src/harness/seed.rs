/// Derive an independent stream seed from a master seed and a tag path
/// (for example `[snr_index, frame_index]`), splitmix-style. Every frame of
/// every experiment owns a disjoint deterministic stream, which makes the
/// Monte Carlo reductions independent of worker count and schedule.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master ^ 0x9e37_79b9_7f4a_7c15;
    for &t in tags {
        state = splitmix(state.wrapping_add(t).wrapping_mul(0xbf58_476d_1ce4_e5b9));
    }
    splitmix(state)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
