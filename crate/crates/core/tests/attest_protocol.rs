mod common;

use adpr_core::attest::{
    backend, default_backend, execute_guest, query_count, query_indices, registered_backends, AttestationBackend,
    Receipt, TranscriptBackend, DEFAULT_BACKEND,
};
use adpr_core::{BlobView, FixedQ, PrivacyParams, RejectReason, SamplePair, Seed};
use proptest::prelude::*;
use rand::Rng;

fn params(seed: u64) -> PrivacyParams {
    PrivacyParams::new(FixedQ::TWO, Seed::from_u64(seed)).unwrap()
}

fn random_blob(seed: u64, n: usize) -> Vec<u8> {
    common::blob_of(common::unit_random(&mut common::rng(seed), n))
}

fn each_backend(mut f: impl FnMut(&dyn AttestationBackend)) {
    for b in registered_backends() {
        f(*b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn completeness(n in 1usize..600, data_seed in any::<u64>(), noise_seed in any::<u64>(), eps_raw in (1i64 << 28)..(16i64 << 32)) {
        let blob = random_blob(data_seed, n);
        let p = PrivacyParams::new(FixedQ::from_raw(eps_raw), Seed::from_u64(noise_seed)).unwrap();
        let view = BlobView::open(&blob).unwrap();
        for b in registered_backends() {
            let r = b.prove(&blob, &p).unwrap();
            prop_assert_eq!(b.verify(&r, &view), Ok(()));
        }
    }
}

#[test]
fn default_backend_is_transcript() {
    assert_eq!(DEFAULT_BACKEND, "transcript-v1");
    assert_eq!(default_backend().id(), "transcript-v1");
    assert!(registered_backends().iter().any(|b| b.id() == DEFAULT_BACKEND));
    assert!(backend("risc0-stark").is_err());
}

#[test]
fn trace_shapes() {
    let small = execute_guest(&random_blob(1, 1), &params(2)).unwrap();
    assert_eq!(small.trace.len(), 2);
    assert_eq!(small.trace[1].rng_counter, small.journal.final_rng_counter);

    let batch = execute_guest(&random_blob(3, 1400), &params(4)).unwrap();
    assert_eq!(batch.trace.len(), 1401);
    assert!(batch.trace[..1400].iter().all(|r| r.rng_counter == 0));
    assert_eq!(batch.trace[1400].rng_counter, 3);
    assert_eq!(batch.trace[1400].acc, batch.trace[1399].acc);

    each_backend(|b| {
        let r = b.prove(&random_blob(3, 1400), &params(4)).unwrap();
        assert_eq!(r.trace_len, 1401);
        assert_eq!(r.openings.len(), 11);
    });
}

#[test]
fn receipts_are_deterministic() {
    let blob = random_blob(5, 300);
    each_backend(|b| {
        let a = b.prove(&blob, &params(6)).unwrap().to_json();
        let c = b.prove(&blob, &params(6)).unwrap().to_json();
        assert_eq!(a, c);
        assert_ne!(a, b.prove(&blob, &params(7)).unwrap().to_json());
    });
}

#[test]
fn receipt_survives_json() {
    let blob = random_blob(8, 257);
    let view = BlobView::open(&blob).unwrap();
    each_backend(|b| {
        let r = b.prove(&blob, &params(9)).unwrap();
        let back = Receipt::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(b.verify(&back, &view), Ok(()));
    });
}

#[test]
fn journal_flip_is_journal_digest() {
    let blob = random_blob(10, 100);
    let view = BlobView::open(&blob).unwrap();
    let mut r = common::rng(11);
    each_backend(|b| {
        let honest = b.prove(&blob, &params(12)).unwrap();
        for _ in 0..200 {
            let mut bad = honest.clone();
            bad.journal = common::mutate_journal(&mut r, &honest.journal).0;
            assert_eq!(b.verify(&bad, &view), Err(RejectReason::JournalDigest));
        }
    });
}

#[test]
fn consistent_journal_lies_are_still_caught() {
    let blob = random_blob(13, 100);
    let other = random_blob(14, 100);
    let view = BlobView::open(&blob).unwrap();
    let honest = default_backend().prove(&blob, &params(15)).unwrap();
    let rewrap = |mut r: Receipt| {
        r.journal_digest = r.journal.digest();
        default_backend().verify(&r, &view)
    };

    let mut r = honest.clone();
    r.journal.dataset_digest = BlobView::open(&other).unwrap().digest();
    assert_eq!(rewrap(r), Err(RejectReason::DatasetDigest));

    let mut r = honest.clone();
    r.journal.program_digest = adpr_core::Digest::of(b"some other guest");
    assert_eq!(rewrap(r), Err(RejectReason::ProgramDigest));

    let mut r = honest.clone();
    r.journal.result.intercept = FixedQ::from_raw(r.journal.result.intercept.raw() + 1);
    // the digest moves the queries, so Fiat-Shamir trips first
    assert_eq!(rewrap(r), Err(RejectReason::FiatShamir));

    // a receipt for different data never verifies against this blob
    let foreign = default_backend().prove(&other, &params(15)).unwrap();
    assert_eq!(default_backend().verify(&foreign, &view), Err(RejectReason::DatasetDigest));
}

#[test]
fn structural_damage_rejections() {
    let blob = random_blob(16, 500);
    let view = BlobView::open(&blob).unwrap();
    let honest = default_backend().prove(&blob, &params(17)).unwrap();
    let v = |r: &Receipt| default_backend().verify(r, &view);

    let mut r = honest.clone();
    r.backend = "risc0".into();
    assert_eq!(v(&r), Err(RejectReason::Backend));
    assert_eq!(adpr_core::verify(&r, &view), Err(RejectReason::Backend));

    let mut r = honest.clone();
    r.openings.pop();
    assert_eq!(v(&r), Err(RejectReason::Malformed));

    let mut r = honest.clone();
    r.trace_len += 1;
    assert_eq!(v(&r), Err(RejectReason::Malformed));

    let mut r = honest.clone();
    r.trace_root = adpr_core::Digest::of(b"root");
    assert!(matches!(v(&r), Err(RejectReason::FiatShamir) | Err(RejectReason::MerklePath)));

    let mut r = honest.clone();
    r.openings[0].leaf.path[0] = adpr_core::Digest::of(b"sibling");
    assert_eq!(v(&r), Err(RejectReason::MerklePath));

    let mut r = honest.clone();
    r.openings[0].leaf.record.acc.sum_y = FixedQ::from_raw(r.openings[0].leaf.record.acc.sum_y.raw() ^ 1);
    assert_eq!(v(&r), Err(RejectReason::MerklePath));

    let mut r = honest.clone();
    r.final_opening.record.acc.n += 1;
    assert_eq!(v(&r), Err(RejectReason::MerklePath));
}

#[test]
fn recommitted_corruption_fails_transition_when_sampled() {
    let blob = random_blob(18, 63);
    let view = BlobView::open(&blob).unwrap();
    let p = params(19);
    let run = execute_guest(&blob, &p).unwrap();
    let m = run.trace.len() as u64;
    let mut r = common::rng(20);
    let (mut sampled, mut caught) = (0, 0);
    for _ in 0..500 {
        let j = r.random_range(0..m as usize);
        let receipt = common::tamper_and_recommit(&run, &view, &p, j, r.random_range(1..1000));
        let hit = query_indices(&receipt.trace_root, &receipt.journal_digest, m).contains(&(j as u64));
        let verdict = TranscriptBackend.verify(&receipt, &view);
        if hit {
            sampled += 1;
            assert_eq!(verdict, Err(RejectReason::Transition), "j = {j}");
            caught += 1;
        } else {
            assert_eq!(verdict, Ok(()), "unsampled corruption at {j} must slip through");
        }
    }
    let rate = caught as f64 / 500.0;
    let expect = common::hit_probability(m, query_count(m));
    assert!((rate - expect).abs() < 0.06, "rate {rate} vs {expect} ({sampled} sampled)");
}

#[test]
fn failure_output_is_attested() {
    // constant x: nvar = 0, so the release fails whenever L2 <= 0
    let flat: Vec<SamplePair> = (0..50).map(|i| SamplePair::new(FixedQ::HALF, FixedQ::from_rational(i % 10, 10).unwrap())).collect();
    let blob = common::blob_of(flat);
    let view = BlobView::open(&blob).unwrap();
    let mut saw = [false, false];
    for s in 0..40 {
        let r = default_backend().prove(&blob, &params(100 + s)).unwrap();
        assert_eq!(default_backend().verify(&r, &view), Ok(()));
        assert_eq!(r.journal.final_rng_counter, if r.journal.result.failed { 2 } else { 3 });
        saw[r.journal.result.failed as usize] = true;
    }
    assert_eq!(saw, [true, true]);
}
