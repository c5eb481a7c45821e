use lieco::cache::Cache;
use serde_json::json;

fn compute(v: u64) -> impl FnOnce() -> Result<u64, String> {
    move || Ok(v)
}

#[test]
fn hit_after_miss() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(Some(dir.path().to_path_buf()));
    let key = json!({"q": 2, "lambda": 0});
    assert_eq!(cache.get_or_compute(&key, compute(1)).unwrap(), 1);
    assert_eq!(cache.get_or_compute(&key, compute(2)).unwrap(), 1);
    let s = cache.stats();
    assert_eq!((s.hits, s.misses, s.corrupt), (1, 1, 0));
}

#[test]
fn version_change_misses() {
    let dir = tempfile::tempdir().unwrap();
    let key = json!({"q": 1});
    let old = Cache::with_version(Some(dir.path().to_path_buf()), "0.0.1");
    assert_eq!(old.get_or_compute(&key, compute(10)).unwrap(), 10);
    let new = Cache::with_version(Some(dir.path().to_path_buf()), "0.0.2");
    assert_ne!(old.key(&key), new.key(&key));
    assert_eq!(new.get_or_compute(&key, compute(20)).unwrap(), 20);
    assert_eq!(new.stats().hits, 0);
}

#[test]
fn stale_entry_under_the_same_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let key = json!({"q": 1});
    let old = Cache::with_version(Some(dir.path().to_path_buf()), "0.0.1");
    let new = Cache::with_version(Some(dir.path().to_path_buf()), "0.0.2");
    // An old-version entry copied under the new key must not be served.
    old.put(&new.key(&key), &5u64).unwrap();
    assert_eq!(new.get_or_compute(&key, compute(6)).unwrap(), 6);
    assert_eq!(new.stats().corrupt, 1);
}

#[test]
fn corrupt_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(Some(dir.path().to_path_buf()));
    let key = json!({"task": "sweep"});
    cache.get_or_compute(&key, compute(3)).unwrap();
    let file = dir.path().join(format!("{}.json", cache.key(&key)));
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replace("\"payload\":\"3\"", "\"payload\":\"4\"")).unwrap();
    assert_eq!(cache.get_or_compute(&key, compute(3)).unwrap(), 3);
    assert_eq!(cache.stats().corrupt, 1);
    std::fs::write(&file, "not json").unwrap();
    assert_eq!(cache.get_or_compute(&key, compute(3)).unwrap(), 3);
    assert_eq!(cache.stats().corrupt, 2);
    let fresh = Cache::new(Some(dir.path().to_path_buf()));
    assert_eq!(fresh.get_or_compute(&key, compute(9)).unwrap(), 3);
}

#[test]
fn disabled_cache_always_computes() {
    let cache = Cache::disabled();
    let key = json!(1);
    assert_eq!(cache.get_or_compute(&key, compute(1)).unwrap(), 1);
    assert_eq!(cache.get_or_compute(&key, compute(2)).unwrap(), 2);
    assert_eq!(cache.stats().misses, 2);
}
