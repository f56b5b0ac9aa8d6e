//! Minimal HTTP/1.1 fixture server on a loopback port.
//!
//! One request per connection (`Connection: close`). Every request is
//! logged with its arrival time so tests can check pacing.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Instant;

pub type Handler = dyn Fn(&str) -> (u16, Vec<u8>) + Send + Sync;

#[derive(Debug, Clone)]
pub struct Hit {
    pub path: String,
    pub at: Instant,
}

pub struct FixtureServer {
    pub base: String,
    log: Arc<Mutex<Vec<Hit>>>,
}

impl FixtureServer {
    pub fn start(handler: impl Fn(&str) -> (u16, Vec<u8>) + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        let base = format!("http://{}", listener.local_addr().unwrap());
        let log = Arc::new(Mutex::new(Vec::new()));
        let handler: Arc<Handler> = Arc::new(handler);
        let log2 = Arc::clone(&log);
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let handler = Arc::clone(&handler);
                let log = Arc::clone(&log2);
                thread::spawn(move || serve(stream, &*handler, &log));
            }
        });
        Self { base, log }
    }

    pub fn hits(&self) -> Vec<Hit> {
        self.log.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, handler: &Handler, log: &Mutex<Vec<Hit>>) {
    let at = Instant::now();
    let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    loop {
        let mut line = String::new();
        match reader.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) if line == "\r\n" || line == "\n" => break,
            Ok(_) => {}
        }
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    log.lock().unwrap().push(Hit { path: path.clone(), at });
    let (status, body) = handler(&path);
    let reason = match status {
        200 => "OK",
        404 => "Not Found",
        429 => "Too Many Requests",
        _ => "Error",
    };
    let mut out = stream;
    let head = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: text/html; charset=utf-8\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    let _ = out.write_all(head.as_bytes());
    let _ = out.write_all(&body);
    let _ = out.flush();
}

/// Title from a `/wiki/...` or `/page/...` request path.
pub fn title_from_path(path: &str) -> Option<String> {
    let rest = path.strip_prefix("/wiki/").or_else(|| path.strip_prefix("/page/"))?;
    let decoded: String = url::form_urlencoded::parse(format!("t={rest}").as_bytes()).next()?.1.into_owned();
    Some(decoded.replace('_', " "))
}
